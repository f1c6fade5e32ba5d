// src/graph-compiler.cc

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

#include "xlmmi/graph-compiler.h"

#include <algorithm>

#include "xlmmi/error.h"

namespace xlmmi {

HmmTopology MakeTopology(int32_t states_per_phone, bool self_loop, int32_t num_phones) {
  if (states_per_phone < 1)
    Fail(ErrorKind::kInvalidParameter, "states_per_phone must be >= 1");
  if (num_phones < 1) Fail(ErrorKind::kInvalidParameter, "num_phones must be >= 1");
  HmmTopology topo;
  topo.states_per_phone_ = states_per_phone;
  topo.self_loop_ = self_loop;
  topo.num_phones_ = num_phones;
  return topo;
}

namespace {

// Appends the emitting chain for `phone` entered from every state in
// `from` (the first arc of each entry carries `entry_weight`); returns the
// chain's last state. Arc indices of the entry arcs go to `entry_arcs`.
StateId AppendPhoneChain(const std::vector<StateId> &from, PhoneId phone, double entry_weight,
                         const HmmTopology &topo, WeightedGraph *g,
                         std::vector<int32_t> *entry_arcs = nullptr) {
  if (phone < 1 || phone > topo.num_phones())
    Fail(ErrorKind::kLabelOutOfRange,
         "phone " + std::to_string(phone) + " outside topology of " +
             std::to_string(topo.num_phones()) + " phones");
  StateId prev = -1;
  for (int32_t k = 0; k < topo.states_per_phone(); k++) {
    const Label label = PdfToLabel(topo.Pdf(phone, k));
    StateId cur = g->AddState();
    if (k == 0) {
      for (StateId s : from) {
        if (entry_arcs) entry_arcs->push_back(static_cast<int32_t>(g->arcs.size()));
        g->AddArc(s, cur, label, entry_weight);
      }
    } else {
      g->AddArc(prev, cur, label, kLogOne);
    }
    if (topo.self_loop()) g->AddArc(cur, cur, label, kLogOne);
    prev = cur;
  }
  return prev;
}

WeightedGraph ExpandLm(const WeightedGraph &lm_fsa, const HmmTopology &topo,
                       bool with_readout) {
  Validate(lm_fsa);
  if (lm_fsa.semantics != LabelSemantics::kPhoneId)
    Fail(ErrorKind::kInvalidGraph, "LM acceptor must have phone-id labels");
  WeightedGraph g;
  g.semantics = LabelSemantics::kPdfId;
  // LM states keep their ids as hub states; chain states follow.
  g.num_states = lm_fsa.num_states;
  std::vector<int32_t> entry_arcs;
  std::vector<std::pair<int32_t, PhoneId>> readouts;
  for (const Arc &arc : lm_fsa.arcs) {
    if (arc.label == kEpsilon) {
      g.AddArc(arc.src, arc.dst, kEpsilon, arc.weight);
      continue;
    }
    entry_arcs.clear();
    StateId last = AppendPhoneChain({arc.src}, arc.label, arc.weight, topo, &g, &entry_arcs);
    for (int32_t a : entry_arcs) readouts.emplace_back(a, arc.label);
    g.AddArc(last, arc.dst, kEpsilon, kLogOne);
  }
  g.starts = lm_fsa.starts;
  g.finals = lm_fsa.finals;
  if (with_readout)
    for (auto [a, phone] : readouts) g.readouts.push_back({a, phone});
  return g;
}

}  // namespace

WeightedGraph BuildNumerator(const PhoneAlternatives &alternatives, const HmmTopology &topo) {
  bool any_phone = false;
  for (const auto &position : alternatives) {
    if (position.empty()) Fail(ErrorKind::kEmptyTranscript, "word without pronunciations");
    for (const PhoneSeq &pron : position) any_phone = any_phone || !pron.empty();
  }
  if (alternatives.empty() || !any_phone)
    Fail(ErrorKind::kEmptyTranscript, "transcript has no phones");

  WeightedGraph g;
  g.semantics = LabelSemantics::kPdfId;
  StateId initial = g.AddState();
  g.starts.push_back({initial, kLogOne});
  // States a following phone may be entered from. Pronunciation variants
  // end in distinct states (their self-loops differ), so this is a set.
  std::vector<StateId> frontier{initial};
  for (const auto &position : alternatives) {
    std::vector<StateId> next;
    for (const PhoneSeq &pron : position) {
      std::vector<StateId> cur = frontier;
      for (PhoneId phone : pron) cur = {AppendPhoneChain(cur, phone, kLogOne, topo, &g)};
      for (StateId s : cur)
        if (std::find(next.begin(), next.end(), s) == next.end()) next.push_back(s);
    }
    frontier = std::move(next);
  }
  for (StateId s : frontier) g.finals.push_back({s, kLogOne});
  return g;
}

WeightedGraph BuildDenominator(const WeightedGraph &lm_fsa, const HmmTopology &topo) {
  return ExpandLm(lm_fsa, topo, false);
}

WeightedGraph BuildDecodeGraph(const WeightedGraph &lm_fsa, const HmmTopology &topo) {
  return ExpandLm(lm_fsa, topo, true);
}

}  // namespace xlmmi
