// tests/decode-test.cc

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
#include "xlmmi/decode.h"
#include "xlmmi/error.h"
#include "xlmmi/graph-compiler.h"
#include "xlmmi/phone-lm.h"

using namespace xlmmi;
using namespace xlmmi::testing;

namespace {

PhoneInventory Inventory(int n) {
  PhoneInventory inv;
  for (int i = 0; i < n; i++) inv.Add(std::string(1, static_cast<char>('a' + i)));
  return inv;
}

WeightedGraph UniformDecodeGraph(int V, int k) {
  return BuildDecodeGraph(LmToFsa(EstimateNGram({}, 0, Inventory(V))),
                          MakeTopology(k, true, V));
}

int32_t Total(const AlignmentCosts &c) { return c.Errors(); }

// Plain recursive edit distance, no backtrace.
int32_t Distance(const PhoneSeq &x, const PhoneSeq &y) {
  std::vector<std::vector<int32_t>> memo(x.size() + 1, std::vector<int32_t>(y.size() + 1, -1));
  std::function<int32_t(size_t, size_t)> d = [&](size_t i, size_t j) -> int32_t {
    if (i == 0) return static_cast<int32_t>(j);
    if (j == 0) return static_cast<int32_t>(i);
    if (memo[i][j] >= 0) return memo[i][j];
    return memo[i][j] = std::min({d(i - 1, j - 1) + (x[i - 1] != y[j - 1]), d(i - 1, j) + 1,
                                  d(i, j - 1) + 1});
  };
  return d(x.size(), y.size());
}

PhoneSeq RandomSeq(std::mt19937_64 &rng, int vocab, int max_len) {
  PhoneSeq s;
  for (int i = 0, l = static_cast<int>(rng() % (max_len + 1)); i < l; i++)
    s.push_back(1 + static_cast<int>(rng() % vocab));
  return s;
}

}  // namespace

TEST_CASE("single-phone decode graph always reads out that phone") {
  std::mt19937_64 rng(1);
  WeightedGraph g = UniformDecodeGraph(1, 1);
  for (int T = 1; T <= 5; T++) CHECK(Viterbi(g, RandomEmissions(rng, T, 1)).phones == PhoneSeq{1});
}

TEST_CASE("emissions favouring one phone") {
  WeightedGraph g = UniformDecodeGraph(2, 1);
  Matrix e(4, 2);
  e.col(0).setConstant(-10.0);
  e.col(1).setConstant(0.0);
  CHECK(Viterbi(g, e).phones == PhoneSeq{2});
}

TEST_CASE("a biased unigram wins under flat emissions") {
  PhoneInventory inv = Inventory(2);
  NGramModel lm(1, inv);
  auto &entry = lm.mutable_levels()[0][{}];
  entry.probs = {{1, 0.81}, {2, 0.09}, {kEos, 0.1}};
  WeightedGraph g = BuildDecodeGraph(LmToFsa(lm), MakeTopology(1, true, 2));
  auto r = Viterbi(g, Matrix::Zero(3, 2));
  CHECK(r.phones == PhoneSeq{1});
  CHECK(std::abs(r.score - std::log(0.81) - std::log(0.1)) < 1e-12);
}

TEST_CASE("viterbi matches the brute-force best path") {
  std::mt19937_64 rng(19);
  int multi = 0;
  for (int i = 0; i < 300; i++) {
    int P = 1 + static_cast<int>(rng() % 4);
    WeightedGraph g = RandomGraph(rng, 6, 12, P, true);
    for (int32_t a = 0; a < static_cast<int32_t>(g.arcs.size()); a += 2)
      if (g.arcs[a].label != kEpsilon) g.readouts.push_back({a, 1 + a % 3});
    Matrix e = RandomEmissions(rng, 1 + static_cast<int>(rng() % 6), P);
    auto paths = EnumerateFramePaths(g, e);
    if (paths.empty()) {
      CHECK_THROWS_AS(Viterbi(g, e), Error);
      continue;
    }
    double best = NegInf();
    for (const auto &p : paths) best = std::max(best, p.score);
    auto r = Viterbi(g, e);
    CHECK(std::abs(r.score - best) < 1e-9);
    // the returned path is a real path with that score
    bool is_argmax = false;
    for (const auto &p : paths)
      if (p.arcs == r.arcs && std::abs(p.score - best) < 1e-9) is_argmax = true;
    CHECK(is_argmax);
    CHECK(r.phones == PathReadout(g, r.arcs));
    double forward = ForwardBackward(g, e).logprob;
    CHECK(r.score <= forward + 1e-12);
    if (paths.size() >= 2) {
      CHECK(r.score < forward);
      multi++;
    }
  }
  CHECK(multi > 50);
}

TEST_CASE("viterbi ties go to the smaller state and arc") {
  // Two parallel arcs with equal weight into the same final state.
  WeightedGraph g;
  g.num_states = 2;
  g.AddArc(0, 1, PdfToLabel(0), 0.0);
  g.AddArc(0, 1, PdfToLabel(0), 0.0);
  g.starts.push_back({0, 0.0});
  g.finals.push_back({1, 0.0});
  g.readouts = {{0, 1}, {1, 2}};
  auto r = Viterbi(g, Matrix::Zero(1, 1));
  CHECK(r.arcs == std::vector<int32_t>{0});
  CHECK(r.phones == PhoneSeq{1});
}

TEST_CASE("viterbi without an accepting path") {
  WeightedGraph g = BuildNumerator({{{1}}, {{2}}}, MakeTopology(1, true, 2));
  try {
    Viterbi(g, Matrix::Zero(1, 2));
    FAIL("expected NoAcceptingPath");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kNoAcceptingPath);
  }
}

TEST_CASE("edit distance examples") {
  auto same = EditDistance({1, 2, 3}, {1, 2, 3});
  CHECK(Total(same) == 0);
  CHECK(*same.Per() == 0.0);
  auto del = EditDistance({1, 2, 3}, {1, 3});
  CHECK(del.deletions == 1);
  CHECK(del.insertions == 0);
  CHECK(del.substitutions == 0);
  CHECK(*del.Per() == doctest::Approx(1.0 / 3));
  auto ins = EditDistance({}, {1});
  CHECK(ins.insertions == 1);
  CHECK(!ins.Per());
  auto sub = EditDistance({1}, {2});
  CHECK(sub.substitutions == 1);
  CHECK(sub.insertions + sub.deletions == 0);
  auto mixed = EditDistance({1, 2}, {3});
  CHECK(mixed.substitutions == 1);
  CHECK(mixed.deletions == 1);
}

TEST_CASE("edit distance properties") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; i++) {
    PhoneSeq x = RandomSeq(rng, 3, 7), y = RandomSeq(rng, 3, 7), z = RandomSeq(rng, 3, 7);
    auto xy = EditDistance(x, y), yx = EditDistance(y, x);
    CHECK(Total(xy) == Distance(x, y));
    CHECK(Total(xy) == Total(yx));
    CHECK(static_cast<int>(x.size()) + xy.insertions - xy.deletions == static_cast<int>(y.size()));
    CHECK(Total(EditDistance(x, z)) <= Total(xy) + Total(EditDistance(y, z)));
  }
}

TEST_CASE("corpus scoring sums counts") {
  PhoneSeq ten = {1, 2, 3, 1, 2, 3, 1, 2, 3, 1};
  auto ident = ScoreCorpus({ten}, {ten});
  CHECK(*ident.total.Per() == 0.0);
  PhoneSeq one_off = ten;
  one_off[4] = 3;
  CHECK(*ScoreCorpus({ten}, {one_off}).total.Per() == doctest::Approx(0.1));
  // utterance PERs 100% and 0%: mean 50%, summed 1/10
  auto s = ScoreCorpus({{1}, {1, 2, 3, 1, 2, 3, 1, 2, 3}}, {{2}, {1, 2, 3, 1, 2, 3, 1, 2, 3}},
                       {"u1", "u2"});
  CHECK(*s.total.Per() == doctest::Approx(0.1));
  CHECK(WriteScoreReport(s) == "u1\t100.00\t0\t0\t1\nu2\t0.00\t0\t0\t0\nTOTAL\t10.00\t0\t0\t1\n");
  auto empty = ScoreCorpus({{}}, {{1}});
  CHECK(WriteScoreReport(empty) == "0\tNA\t1\t0\t0\nTOTAL\tNA\t1\t0\t0\n");
  CHECK_THROWS_AS(ScoreCorpus({{1}}, {}), Error);
}
