// bench/forward-backward-bench.cc

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

// Parallel vs serial reference forward-backward on compiled denominator
// graphs of increasing LM order.

#include <benchmark/benchmark.h>

#include <random>

#include "xlmmi/graph-compiler.h"
#include "xlmmi/lfmmi.h"
#include "xlmmi/phone-lm.h"

namespace {

using namespace xlmmi;

struct Fixture {
  WeightedGraph den;
  Matrix emissions;
};

Fixture MakeFixture(int32_t order, int32_t frames) {
  constexpr int32_t kPhones = 20;
  std::mt19937_64 rng(order * 1000 + frames);
  std::uniform_int_distribution<int32_t> phone(1, kPhones), length(3, 15);
  PhoneInventory vocab;
  for (int32_t p = 0; p < kPhones; p++) vocab.Add("p" + std::to_string(p));
  WeightedCorpus corpus;
  for (int i = 0; i < 3000; i++) {
    PhoneSeq s(length(rng));
    for (PhoneId &p : s) p = phone(rng);
    corpus.utterances.push_back(std::move(s));
  }
  Fixture f;
  f.den = BuildDenominator(LmToFsa(EstimateNGram({corpus}, order, vocab)), MakeTopology(2, true, kPhones));
  std::normal_distribution<double> n(0.0, 2.0);
  f.emissions.resize(frames, 2 * kPhones);
  for (Eigen::Index i = 0; i < f.emissions.size(); i++) f.emissions.data()[i] = n(rng);
  return f;
}

template <ForwardBackwardResult (*Kernel)(const WeightedGraph &, const EmissionMatrix &)>
void BM_ForwardBackward(benchmark::State &state) {
  Fixture f = MakeFixture(static_cast<int32_t>(state.range(0)), static_cast<int32_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.den, f.emissions));
  state.counters["arcs"] = static_cast<double>(f.den.arcs.size());
  state.counters["arc_frames/s"] = benchmark::Counter(
      static_cast<double>(f.den.arcs.size()) * f.emissions.rows(), benchmark::Counter::kIsIterationInvariantRate);
}

BENCHMARK_TEMPLATE(BM_ForwardBackward, ForwardBackward)
    ->ArgsProduct({{1, 2, 3}, {100}})
    ->Unit(benchmark::kMillisecond);
// The reference closure scans every arc per state, so order 3 takes minutes.
BENCHMARK_TEMPLATE(BM_ForwardBackward, ForwardBackwardReference)
    ->ArgsProduct({{1, 2}, {100}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
