// tests/fixtures.h

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

// Random problem generators shared by the tests. Unlike oracles.h these use
// the library's graph builders.

#ifndef XLMMI_TESTS_FIXTURES_H_
#define XLMMI_TESTS_FIXTURES_H_

#include <random>
#include <string>

#include "oracles.h"
#include "xlmmi/graph-compiler.h"
#include "xlmmi/phone-lm.h"

namespace xlmmi::testing {

inline PhoneInventory Inventory(int n) {
  PhoneInventory inv;
  for (int i = 0; i < n; i++) inv.Add(std::string(1, static_cast<char>('a' + i)));
  return inv;
}

struct Instance {
  WeightedGraph num, den;
  Matrix e;
};

// Numerator from a random transcript, denominator from a random LM over the
// same phones, both compiled with the same topology.
inline Instance RandomInstance(std::mt19937_64 &rng, int max_frames) {
  std::uniform_int_distribution<int> nphones(2, 4), order(0, 3), k(1, 2);
  int V = nphones(rng);
  HmmTopology topo = MakeTopology(k(rng), true, V);
  std::uniform_int_distribution<int> phone(1, V), len(1, 5);
  WeightedCorpus corpus;
  for (int u = 0; u < 5; u++) {
    PhoneSeq s;
    for (int i = 0, l = len(rng); i < l; i++) s.push_back(phone(rng));
    corpus.utterances.push_back(s);
  }
  Instance inst;
  inst.den = BuildDenominator(LmToFsa(EstimateNGram({corpus}, order(rng), Inventory(V))), topo);
  int m = 1 + static_cast<int>(rng() % 2);
  int T = std::uniform_int_distribution<int>(m * topo.states_per_phone(), max_frames)(rng);
  PhoneAlternatives alts;
  for (int i = 0; i < m; i++) {
    alts.push_back({{phone(rng)}});
    if (rng() % 3 == 0) alts.back().push_back({phone(rng), phone(rng)});
  }
  inst.num = BuildNumerator(alts, topo);
  inst.e = RandomEmissions(rng, T, topo.NumPdfs(), 1.0);
  return inst;
}

}  // namespace xlmmi::testing

#endif  // XLMMI_TESTS_FIXTURES_H_
