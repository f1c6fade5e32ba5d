// include/xlmmi/graph-compiler.h

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

#ifndef XLMMI_GRAPH_COMPILER_H_
#define XLMMI_GRAPH_COMPILER_H_

#include <cstdint>

#include "xlmmi/phone-inventory.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

// Monophone left-to-right HMMs, `states_per_phone` emitting states each.
// pdf-id = (phone - 1) * states_per_phone + state. Transitions are unweighted.
class HmmTopology {
 public:
  HmmTopology() = default;

  int32_t states_per_phone() const { return states_per_phone_; }
  bool self_loop() const { return self_loop_; }
  int32_t num_phones() const { return num_phones_; }
  int32_t NumPdfs() const { return num_phones_ * states_per_phone_; }
  int32_t Pdf(PhoneId phone, int32_t state) const {
    return (phone - 1) * states_per_phone_ + state;
  }
  // Frames needed to traverse one phone.
  int32_t MinDuration() const { return states_per_phone_; }

 private:
  friend HmmTopology MakeTopology(int32_t, bool, int32_t);
  int32_t states_per_phone_ = 1;
  bool self_loop_ = true;
  int32_t num_phones_ = 0;
};

// Throws kInvalidParameter for k < 1 or num_phones < 1.
HmmTopology MakeTopology(int32_t states_per_phone, bool self_loop, int32_t num_phones);

// Concatenation over word positions of the union over pronunciations, each
// phone expanded by `topo`. No epsilon arcs and no LM weights. Throws
// kEmptyTranscript, kLabelOutOfRange.
WeightedGraph BuildNumerator(const PhoneAlternatives &alternatives, const HmmTopology &topo);

// Replaces each phone arc of the LM acceptor with the phone's HMM chain
// (LM weight on the first emitting arc) followed by an epsilon arc back to
// the LM state; backoff arcs stay as epsilon arcs. Throws kLabelOutOfRange
// and kInvalidGraph for non-phone-labeled input.
WeightedGraph BuildDenominator(const WeightedGraph &lm_fsa, const HmmTopology &topo);

// BuildDenominator plus readout records marking the first emitting arc of
// each phone chain.
WeightedGraph BuildDecodeGraph(const WeightedGraph &lm_fsa, const HmmTopology &topo);

}  // namespace xlmmi

#endif  // XLMMI_GRAPH_COMPILER_H_
