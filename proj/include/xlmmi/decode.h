// include/xlmmi/decode.h

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

#ifndef XLMMI_DECODE_H_
#define XLMMI_DECODE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xlmmi/lfmmi.h"
#include "xlmmi/phone-inventory.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

struct ViterbiResult {
  double score = kLogZero;
  std::vector<int32_t> arcs;  // best path, in order
  PhoneSeq phones;            // readout along the best path
};

// Max-semiring search over the same path set as ForwardBackward. Ties go to
// the candidate with the smaller (source state, arc index). Throws
// kNoAcceptingPath.
ViterbiResult Viterbi(const WeightedGraph &decode_graph, const EmissionMatrix &emissions);

struct AlignmentCosts {
  int32_t insertions = 0;
  int32_t deletions = 0;
  int32_t substitutions = 0;
  int32_t reference_length = 0;

  int32_t Errors() const { return insertions + deletions + substitutions; }
  // nullopt when the reference is empty.
  std::optional<double> Per() const {
    if (reference_length == 0) return std::nullopt;
    return static_cast<double>(Errors()) / reference_length;
  }
};

// Unit-cost Levenshtein alignment; the backtrace prefers substitution (or
// match), then insertion, then deletion.
AlignmentCosts EditDistance(const PhoneSeq &ref, const PhoneSeq &hyp);

struct CorpusScore {
  std::vector<std::string> ids;
  std::vector<AlignmentCosts> utterances;
  AlignmentCosts total;  // summed counts; PER is computed from these
};

// Throws kLengthMismatch.
CorpusScore ScoreCorpus(const std::vector<PhoneSeq> &refs, const std::vector<PhoneSeq> &hyps,
                        std::vector<std::string> ids = {});

// `id<TAB>per<TAB>ins<TAB>del<TAB>sub` per utterance then a TOTAL row; PER
// as a percentage, "NA" for an empty reference.
std::string WriteScoreReport(const CorpusScore &score);

}  // namespace xlmmi

#endif  // XLMMI_DECODE_H_
