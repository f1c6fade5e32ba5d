// tests/wfsa-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.h"
#include "xlmmi/error.h"
#include "xlmmi/wfsa.h"

using namespace xlmmi;
using namespace xlmmi::testing;

namespace {

WeightedGraph TwoPathGraph() {
  // 0 -a-> 1 -b-> 2 and 0 -c-> 2, weights ln 0.5, ln 0.5, ln 0.25
  WeightedGraph g;
  g.num_states = 3;
  g.AddArc(0, 1, 1, std::log(0.5));
  g.AddArc(1, 2, 2, std::log(0.5));
  g.AddArc(0, 2, 3, std::log(0.25));
  g.starts.push_back({0, 0.0});
  g.finals.push_back({2, 0.0});
  return g;
}

ErrorKind KindOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("log semiring primitives") {
  CHECK(LogAdd(kLogZero, kLogZero) == kLogZero);
  CHECK(LogAdd(kLogZero, 1.5) == 1.5);
  CHECK(LogAdd(std::log(0.25), std::log(0.5)) == doctest::Approx(std::log(0.75)).epsilon(1e-15));
  CHECK(LogAdd(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  LogSumAccumulator acc;
  for (double p : {0.1, 0.2, 0.3}) acc.Add(std::log(p));
  CHECK(acc.Value() == doctest::Approx(std::log(0.6)).epsilon(1e-14));
}

TEST_CASE("total weight of a two-path acyclic graph") {
  CHECK(TotalWeight(TwoPathGraph()) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("total weight matches path enumeration on random acyclic graphs") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; i++) {
    WeightedGraph g = RandomAcyclicGraph(rng, 7, 14);
    double expected = LogSumExp(EnumeratePathWeights(g, g.num_states));
    double got = TotalWeight(g);
    if (expected == NegInf()) CHECK(got == NegInf());
    else CHECK(std::abs(got - expected) < 1e-9);
  }
}

TEST_CASE("total weight of cyclic graphs needs a bound") {
  WeightedGraph g;
  g.num_states = 2;
  g.AddArc(0, 0, 1, std::log(0.5));
  g.AddArc(0, 1, 2, std::log(0.5));
  g.starts.push_back({0, 0.0});
  g.finals.push_back({1, 0.0});
  CHECK(!IsAcyclic(g));
  CHECK(KindOf([&] { TotalWeight(g); }) == ErrorKind::kCyclicWithoutBound);
  // paths with at most 4 arcs: sum_{j=0..3} 0.5^(j+1) = 0.9375
  CHECK(TotalWeight(g, 4) == doctest::Approx(std::log(0.9375)).epsilon(1e-14));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; i++) {
    WeightedGraph r = RandomGraph(rng, 5, 9, 3, true);
    double expected = LogSumExp(EnumeratePathWeights(r, 5));
    double got = TotalWeight(r, 5);
    if (expected == NegInf()) CHECK(got == NegInf());
    else CHECK(std::abs(got - expected) < 1e-9);
  }
}

TEST_CASE("trim keeps only useful states and preserves the total weight") {
  WeightedGraph g = TwoPathGraph();
  g.num_states = 5;
  g.AddArc(3, 2, 1, 0.0);  // not accessible
  g.AddArc(0, 4, 1, 0.0);  // not coaccessible
  WeightedGraph t = Trim(g);
  CHECK(t.num_states == 3);
  CHECK(t.arcs.size() == 3);
  CHECK(TotalWeight(t) == doctest::Approx(TotalWeight(g)).epsilon(1e-15));

  std::mt19937_64 rng(3);
  int trimmed = 0;
  for (int i = 0; i < 200; i++) {
    WeightedGraph r = RandomAcyclicGraph(rng, 8, 10);
    double total = TotalWeight(r);
    if (total == NegInf()) {
      CHECK(KindOf([&] { Trim(r); }) == ErrorKind::kEmptyGraph);
      continue;
    }
    WeightedGraph tr = Trim(r);
    CHECK(tr.num_states <= r.num_states);
    CHECK(std::abs(TotalWeight(tr) - total) < 1e-9);
    trimmed++;
  }
  CHECK(trimmed > 20);
}

TEST_CASE("validate rejects malformed graphs") {
  WeightedGraph g = TwoPathGraph();
  g.arcs[0].dst = 9;
  CHECK(KindOf([&] { Validate(g); }) == ErrorKind::kInvalidGraph);
  g = TwoPathGraph();
  g.finals.clear();
  CHECK(KindOf([&] { Validate(g); }) == ErrorKind::kInvalidGraph);
  g = TwoPathGraph();
  g.readouts.push_back({7, 1});
  CHECK(KindOf([&] { Validate(g); }) == ErrorKind::kInvalidGraph);
}

TEST_CASE("epsilon order") {
  WeightedGraph g;
  g.num_states = 3;
  g.AddArc(2, 1, kEpsilon, 0.0);
  g.AddArc(1, 0, kEpsilon, 0.0);
  g.AddArc(0, 2, 1, 0.0);
  g.starts.push_back({0, 0.0});
  g.finals.push_back({2, 0.0});
  auto order = EpsilonTopologicalOrder(g);
  std::vector<int> pos(3);
  for (int i = 0; i < 3; i++) pos[order[i]] = i;
  CHECK(pos[2] < pos[1]);
  CHECK(pos[1] < pos[0]);
  g.AddArc(0, 2, kEpsilon, 0.0);
  CHECK(KindOf([&] { EpsilonTopologicalOrder(g); }) == ErrorKind::kEpsilonCycle);
}

TEST_CASE("text round trip is exact") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; i++) {
    WeightedGraph g = RandomGraph(rng, 6, 12, 4, true);
    g.arcs.push_back({0, 1, 2, kLogZero});
    if (i % 2) g.semantics = LabelSemantics::kPhoneId;
    CHECK(ReadGraph(WriteGraph(g)) == g);
  }
  WeightedGraph d = TwoPathGraph();
  d.readouts = {{0, 3}, {2, 1}};
  CHECK(ReadGraph(WriteGraph(d)) == d);
}

TEST_CASE("graph parse errors carry the line") {
  try {
    ReadGraph("WFSA v1 3 pdf-id\nA 0 1 1 0\nA 0 7 1 0\nS 0 0\nF 1 0\n");
    FAIL("expected ParseError");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(KindOf([] { ReadGraph("A 0 1 1 0\n"); }) == ErrorKind::kParse);
  CHECK(KindOf([] { ReadGraph("WFSA v1 2 pdf-id\nA 0 1 1 zz\nS 0 0\nF 1 0\n"); }) ==
        ErrorKind::kParse);
  // structurally invalid (no final) surfaces as a parse error too
  CHECK(KindOf([] { ReadGraph("WFSA v1 2 pdf-id\nA 0 1 1 0\nS 0 0\n"); }) == ErrorKind::kParse);
}

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 100.0);
  for (int i = 0; i < 1000; i++) {
    double x = n(rng);
    CHECK(*ParseDouble(FormatDouble(x)) == x);
  }
  CHECK(FormatDouble(kLogZero) == "-inf");
  CHECK(*ParseDouble("-inf") == kLogZero);
  CHECK(!ParseDouble("1.5x"));
}
