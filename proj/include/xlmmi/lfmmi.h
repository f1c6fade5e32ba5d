// include/xlmmi/lfmmi.h

// Copyright 2026  The xlmmi Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef XLMMI_LFMMI_H_
#define XLMMI_LFMMI_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "xlmmi/wfsa.h"

namespace xlmmi {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// T x P unnormalized log-scores, one row per frame, one column per pdf-id.
using EmissionMatrix = Matrix;

struct ForwardBackwardResult {
  bool accepted = false;             // false: no T-frame path, logprob = -inf
  double logprob = kLogZero;         // from the forward pass
  double backward_logprob = kLogZero;  // same quantity from the backward pass
  Matrix occupancy;                  // T x P frame posteriors over pdf-ids
};

// Exact log-space forward-backward. Epsilon arcs are taken between frames;
// the epsilon subgraph must be acyclic (Error kEpsilonCycle). Throws
// kLabelOutOfRange if an arc's pdf-id is not a column of `emissions`.
//
// This version parallelizes the per-frame state updates and the occupancy
// accumulation with OpenMP.
ForwardBackwardResult ForwardBackward(const WeightedGraph &graph,
                                      const EmissionMatrix &emissions);

// Serial arc-order implementation of the same computation.
ForwardBackwardResult ForwardBackwardReference(const WeightedGraph &graph,
                                               const EmissionMatrix &emissions);

struct LossResult {
  double loss = 0.0;  // den_logprob - num_logprob
  double num_logprob = 0.0;
  double den_logprob = 0.0;
  Matrix grad;  // d loss / d emissions = occupancy_den - occupancy_num
};

// Throws kNumeratorPruned when the numerator has no T-frame path and
// kNoAcceptingPath when the denominator has none.
LossResult LfmmiLoss(const WeightedGraph &num, const WeightedGraph &den,
                     const EmissionMatrix &emissions);

struct BatchLossResult {
  std::vector<std::optional<LossResult>> utterances;  // nullopt = skipped
  std::vector<int32_t> skipped;                        // pruned utterance indices
  double total_loss = 0.0;                             // summed in index order
};

// Utterances are evaluated concurrently; the total is reduced in utterance
// order. NumeratorPruned utterances are skipped and listed; any other error
// propagates.
BatchLossResult BatchLoss(const std::vector<WeightedGraph> &nums, const WeightedGraph &den,
                          const std::vector<EmissionMatrix> &emissions);

// EMAT binary: "EMAT", u32 version (1), u32 rows, u32 cols, then rows*cols
// float32, all little-endian, row-major.
std::string WriteEmat(const Matrix &m);
Matrix ReadEmat(std::string_view bytes);

}  // namespace xlmmi

#endif  // XLMMI_LFMMI_H_
