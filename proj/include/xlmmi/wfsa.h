// include/xlmmi/wfsa.h

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

#ifndef XLMMI_WFSA_H_
#define XLMMI_WFSA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlmmi/log-weight.h"

namespace xlmmi {

using StateId = int32_t;
using Label = int32_t;

// Label 0 is epsilon in both label spaces. In pdf-labeled graphs an emitting
// arc carries label pdf-id + 1, so pdf-id p is emission column p.
inline constexpr Label kEpsilon = 0;

inline Label PdfToLabel(int32_t pdf) { return pdf + 1; }
inline int32_t LabelToPdf(Label label) { return label - 1; }

enum class LabelSemantics { kPdfId, kPhoneId };

std::string_view LabelSemanticsName(LabelSemantics s);

struct Arc {
  StateId src = 0;
  StateId dst = 0;
  Label label = kEpsilon;
  double weight = kLogOne;

  bool operator==(const Arc &) const = default;
};

struct StateWeight {
  StateId state = 0;
  double weight = kLogOne;

  bool operator==(const StateWeight &) const = default;
};

// Readout annotation on a decode-graph arc: Viterbi backtraces emit `phone`
// whenever they pass through arc `arc`.
struct Readout {
  int32_t arc = 0;
  int32_t phone = 0;

  bool operator==(const Readout &) const = default;
};

// Weighted finite-state acceptor in the log semiring. A plain value type;
// construction is by filling the public members and calling Validate().
struct WeightedGraph {
  int32_t num_states = 0;
  LabelSemantics semantics = LabelSemantics::kPdfId;
  std::vector<Arc> arcs;
  std::vector<StateWeight> starts;
  std::vector<StateWeight> finals;
  std::vector<Readout> readouts;  // decode graphs only; sorted by arc index

  StateId AddState() { return num_states++; }
  void AddArc(StateId src, StateId dst, Label label, double weight) {
    arcs.push_back({src, dst, label, weight});
  }

  bool operator==(const WeightedGraph &) const = default;
};

// Checks index ranges, readout references and that at least one start and
// one final entry carry non-zero weight. Throws Error(kInvalidGraph).
void Validate(const WeightedGraph &g);

// Removes states that are not on any start-to-final path (arcs with -inf
// weight count as absent). Surviving states keep their relative order.
// Throws Error(kEmptyGraph) if nothing survives.
WeightedGraph Trim(const WeightedGraph &g);

bool IsAcyclic(const WeightedGraph &g);

// Log-sum over all accepted paths of start + arc + final weights, labels
// ignored. Cyclic graphs need `max_arcs`, the longest path length summed
// over; otherwise Error(kCyclicWithoutBound).
double TotalWeight(const WeightedGraph &g,
                   std::optional<int32_t> max_arcs = std::nullopt);

// Largest pdf-id used by an emitting arc, plus one (0 for a graph with only
// epsilon arcs).
int32_t NumPdfs(const WeightedGraph &g);

// Order of states such that every epsilon arc goes forward. Throws
// Error(kEpsilonCycle) if the epsilon subgraph is cyclic.
std::vector<StateId> EpsilonTopologicalOrder(const WeightedGraph &g);

std::string WriteGraph(const WeightedGraph &g);
WeightedGraph ReadGraph(std::string_view text);

// Shortest decimal form that parses back to the same double; "-inf" for
// the log zero.
std::string FormatDouble(double x);
std::optional<double> ParseDouble(std::string_view s);

}  // namespace xlmmi

#endif  // XLMMI_WFSA_H_
