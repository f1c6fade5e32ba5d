// tests/phone-lm-test.cc

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

#include <cmath>
#include <random>

#include "xlmmi/error.h"
#include "xlmmi/phone-lm.h"

using namespace xlmmi;

namespace {

PhoneInventory Abc() {
  PhoneInventory inv;
  inv.Add("a");
  inv.Add("b");
  inv.Add("c");
  return inv;
}
constexpr PhoneId a = 1, b = 2, c = 3;

// Corpus 1 (weight 1): "a b", "a". Corpus 2 (weight 0.5): "b b c".
std::vector<WeightedCorpus> HandFixture() {
  return {{{{a, b}, {a}}, 1.0}, {{{b, b, c}}, 0.5}};
}

std::vector<WeightedCorpus> RandomCorpora(std::mt19937_64 &rng, int vocab, int ncorpora) {
  std::vector<WeightedCorpus> corpora;
  std::uniform_int_distribution<int> phone(1, vocab), len(0, 6), nutt(1, 5);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  for (int k = 0; k < ncorpora; k++) {
    WeightedCorpus wc;
    wc.weight = weight(rng);
    for (int u = 0, n = nutt(rng); u < n; u++) {
      PhoneSeq s;
      for (int i = 0, l = len(rng); i < l; i++) s.push_back(phone(rng));
      wc.utterances.push_back(s);
    }
    corpora.push_back(wc);
  }
  return corpora;
}

PhoneSeq RandomSeq(std::mt19937_64 &rng, int vocab, int max_len) {
  std::uniform_int_distribution<int> phone(1, vocab), len(0, max_len);
  PhoneSeq s;
  for (int i = 0, l = len(rng); i < l; i++) s.push_back(phone(rng));
  return s;
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

TEST_CASE("hand fixture fractional counts") {
  NGramCounts counts = AccumulateCounts(HandFixture(), 2);
  const auto &bi = counts.levels[1];
  CHECK(bi.at({kBos}).at(a) == 2.0);
  CHECK(bi.at({kBos}).at(b) == 0.5);
  CHECK(bi.at({a}).at(b) == 1.0);
  CHECK(bi.at({a}).at(kEos) == 1.0);
  CHECK(bi.at({b}).at(kEos) == 1.0);
  CHECK(bi.at({b}).at(b) == 0.5);
  CHECK(bi.at({b}).at(c) == 0.5);
  CHECK(bi.at({c}).at(kEos) == 0.5);
  CHECK(bi.size() == 4);
  const auto &uni = counts.levels[0].at({});
  CHECK(uni.at(a) == 2.0);
  CHECK(uni.at(b) == 2.0);
  CHECK(uni.at(c) == 0.5);
  CHECK(uni.at(kEos) == 2.5);
  CHECK(uni.size() == 4);
}

TEST_CASE("hand fixture Witten-Bell probabilities") {
  NGramModel lm = EstimateNGram(HandFixture(), 2, Abc());
  // unigram: a 2, b 2, c 0.5, EOS 2.5; total 7, 4 types, uniform 1/4 -> (c + 1) / 11
  const double pa = 3.0 / 11, pb = 3.0 / 11, pc = 1.5 / 11, pe = 3.5 / 11;
  CHECK(std::abs(lm.Prob({}, a) - pa) < 1e-12);
  CHECK(std::abs(lm.Prob({}, b) - pb) < 1e-12);
  CHECK(std::abs(lm.Prob({}, c) - pc) < 1e-12);
  CHECK(std::abs(lm.Prob({}, kEos) - pe) < 1e-12);
  // <s>: c=2.5, N=2
  CHECK(std::abs(lm.Prob({kBos}, a) - (2.0 + 2 * pa) / 4.5) < 1e-12);
  CHECK(std::abs(lm.Prob({kBos}, b) - (0.5 + 2 * pb) / 4.5) < 1e-12);
  CHECK(std::abs(lm.Prob({kBos}, c) - (2 * pc) / 4.5) < 1e-12);
  CHECK(std::abs(lm.Prob({kBos}, kEos) - (2 * pe) / 4.5) < 1e-12);
  // a: c=2, N=2
  CHECK(std::abs(lm.Prob({a}, b) - (1.0 + 2 * pb) / 4.0) < 1e-12);
  CHECK(std::abs(lm.Prob({a}, a) - (2 * pa) / 4.0) < 1e-12);
  // b: c=2, N=3
  CHECK(std::abs(lm.Prob({b}, c) - (0.5 + 3 * pc) / 5.0) < 1e-12);
  CHECK(std::abs(lm.Prob({b}, kEos) - (1.0 + 3 * pe) / 5.0) < 1e-12);
  // c: c=0.5, N=1
  CHECK(std::abs(lm.Prob({c}, kEos) - (0.5 + pe) / 1.5) < 1e-12);
  CHECK(std::abs(lm.Prob({c}, a) - pa / 1.5) < 1e-12);
  CHECK(std::abs(lm.FindContext({b})->backoff - 3.0 / 5.0) < 1e-12);
  // the history is truncated to the model order
  CHECK(lm.Prob({a, a, c}, kEos) == lm.Prob({c}, kEos));
}

TEST_CASE("order 1 on a single utterance") {
  NGramModel lm = EstimateNGram({{{{a, a, b}}, 1.0}}, 1, Abc());
  // counts a:2 b:1 EOS:1, total 4, 3 types, uniform 1/4
  CHECK(std::abs(lm.Prob({}, a) - (2 + 0.75) / 7.0) < 1e-12);
  CHECK(std::abs(lm.Prob({}, b) - (1 + 0.75) / 7.0) < 1e-12);
  CHECK(std::abs(lm.Prob({}, c) - 0.75 / 7.0) < 1e-12);
  CHECK(std::abs(lm.Prob({}, kEos) - (1 + 0.75) / 7.0) < 1e-12);
  CHECK(std::abs(SequenceLogProb(lm, {a}) - std::log(2.75 / 7.0) - std::log(1.75 / 7.0)) <
        1e-12);
  WeightedGraph fsa = LmToFsa(lm);
  CHECK(fsa.num_states == 1);
  CHECK(fsa.semantics == LabelSemantics::kPhoneId);
  CHECK(fsa.arcs.size() == 3);
  for (const Arc &arc : fsa.arcs) CHECK(std::abs(arc.weight - std::log(lm.Prob({}, arc.label))) < 1e-12);
}

TEST_CASE("order 0 is uniform over phones and end of sentence") {
  NGramModel lm = EstimateNGram({}, 0, Abc());
  for (int32_t s : {a, b, c, kEos}) CHECK(lm.Prob({a, b}, s) == doctest::Approx(0.25));
  CHECK(std::abs(SequenceLogProb(lm, {a, b, c}) - 4 * std::log(0.25)) < 1e-12);
  WeightedGraph fsa = LmToFsa(lm);
  CHECK(fsa.num_states == 1);
  CHECK(fsa.arcs.size() == 3);
  for (const Arc &arc : fsa.arcs) {
    CHECK(arc.src == 0);
    CHECK(arc.dst == 0);
    CHECK(std::abs(arc.weight - std::log(0.25)) < 1e-12);
  }
  REQUIRE(fsa.finals.size() == 1);
  CHECK(std::abs(fsa.finals[0].weight - std::log(0.25)) < 1e-12);
}

TEST_CASE("corpus weights scale counts") {
  // [[a]] x 2.0 and [[b]] x 1.0 give a:2, b:1, EOS:3
  std::vector<WeightedCorpus> weighted = {{{{a}}, 2.0}, {{{b}}, 1.0}};
  auto uni = AccumulateCounts(weighted, 1).levels[0].at({});
  CHECK(uni.at(a) == 2.0);
  CHECK(uni.at(b) == 1.0);
  CHECK(uni.at(kEos) == 3.0);
  NGramModel x = EstimateNGram(weighted, 1, Abc());
  NGramModel y = EstimateNGram({{{{a}, {a}, {b}}, 1.0}}, 1, Abc());
  for (int32_t s : {a, b, c, kEos}) CHECK(std::abs(x.Prob({}, s) - y.Prob({}, s)) < 1e-12);
}

TEST_CASE("count linearity with integer weights") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; trial++) {
    auto corpora = RandomCorpora(rng, 3, 2);
    corpora[0].weight = 1 + trial % 3;
    corpora[1].weight = 1 + trial % 2;
    WeightedCorpus replicated;
    for (const auto &wc : corpora)
      for (int r = 0; r < static_cast<int>(wc.weight); r++)
        replicated.utterances.insert(replicated.utterances.end(), wc.utterances.begin(),
                                     wc.utterances.end());
    int order = 1 + trial % 3;
    NGramModel x = EstimateNGram(corpora, order, Abc());
    NGramModel y = EstimateNGram({replicated}, order, Abc());
    for (int i = 0; i < 20; i++) {
      PhoneSeq s = RandomSeq(rng, 3, 6);
      CHECK(std::abs(SequenceLogProb(x, s) - SequenceLogProb(y, s)) < 1e-9);
    }
  }
}

TEST_CASE("a zero-weight corpus is inert") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; trial++) {
    auto corpora = RandomCorpora(rng, 3, 2);
    auto with_zero = corpora;
    with_zero.push_back(RandomCorpora(rng, 3, 1)[0]);
    with_zero.back().weight = 0.0;
    for (int order = 1; order <= 4; order++) {
      NGramModel x = EstimateNGram(corpora, order, Abc());
      NGramModel y = EstimateNGram(with_zero, order, Abc());
      CHECK(x.levels().size() == y.levels().size());
      for (size_t m = 0; m < x.levels().size(); m++)
        CHECK(x.levels()[m].size() == y.levels()[m].size());
      for (int i = 0; i < 10; i++) {
        LmContext h = RandomSeq(rng, 3, order);
        for (int32_t s : {a, b, c, kEos}) CHECK(std::abs(x.Prob(h, s) - y.Prob(h, s)) < 1e-12);
      }
    }
  }
}

TEST_CASE("only zero-weight data is rejected") {
  CHECK(KindOf([] { EstimateNGram({{{{a}}, 0.0}}, 2, Abc()); }) == ErrorKind::kEmptyTrainingData);
  CHECK(KindOf([] { EstimateNGram({}, 1, Abc()); }) == ErrorKind::kEmptyTrainingData);
  CHECK(KindOf([] { EstimateNGram({{{{a}}, 1.0}}, -1, Abc()); }) == ErrorKind::kInvalidOrder);
  CHECK(KindOf([] { EstimateNGram({{{{a}}, -1.0}}, 1, Abc()); }) == ErrorKind::kInvalidParameter);
  CHECK(KindOf([] { EstimateNGram({{{{a, 9}}, 1.0}}, 1, Abc()); }) == ErrorKind::kUnknownPhone);
}

TEST_CASE("monotone influence of a corpus weight") {
  std::vector<WeightedCorpus> corpora = {{{{a, b}, {b, c, a}, {c}}, 1.0}, {{{c, c}, {c}}, 0.0}};
  for (int order = 1; order <= 3; order++) {
    double prev = 0.0;
    for (double w : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      corpora[1].weight = w;
      double p = EstimateNGram(corpora, order, Abc()).Prob({}, c);
      CHECK(p >= prev - 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("every context is normalized") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; trial++) {
    auto corpora = RandomCorpora(rng, 3, 2);
    for (int order = 0; order <= 4; order++) {
      NGramModel lm = EstimateNGram(corpora, order, Abc());
      for (const auto &level : lm.levels())
        for (const auto &[ctx, entry] : level) {
          double sum = 0.0;
          for (int32_t s : {a, b, c, kEos}) sum += lm.Prob(ctx, s);
          CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
  }
}

TEST_CASE("acceptor scores match direct scoring") {
  std::mt19937_64 rng(31);
  PhoneInventory inv;
  for (const char *s : {"p", "t", "k", "m", "n"}) inv.Add(s);
  for (int order = 0; order <= 4; order++) {
    auto corpora = RandomCorpora(rng, 5, 3);
    NGramModel lm = EstimateNGram(corpora, order, inv);
    WeightedGraph fsa = LmToFsa(lm);
    Validate(fsa);
    REQUIRE(fsa.starts.size() == 1);
    for (int i = 0; i < 100; i++) {
      PhoneSeq s = RandomSeq(rng, 5, 10);
      CHECK(std::abs(BackoffAcceptorScore(fsa, s) - SequenceLogProb(lm, s)) < 1e-9);
    }
  }
}

TEST_CASE("sequence scoring rejects unknown phones") {
  NGramModel lm = EstimateNGram(HandFixture(), 2, Abc());
  CHECK(KindOf([&] { SequenceLogProb(lm, {a, 4}); }) == ErrorKind::kUnknownPhone);
}

TEST_CASE("ARPA round trip") {
  std::mt19937_64 rng(13);
  NGramModel uni = EstimateNGram({{{{a, a, b}}, 1.0}}, 1, Abc());
  std::string text = WriteArpa(uni);
  CHECK(text.find("\\1-grams:") != std::string::npos);
  CHECK(text.find("ngram 1=4") != std::string::npos);
  for (int order = 0; order <= 4; order++) {
    auto corpora = RandomCorpora(rng, 3, 2);
    NGramModel lm = EstimateNGram(corpora, order, Abc());
    NGramModel back = ReadArpa(WriteArpa(lm), Abc());
    CHECK(back.order() == order);
    for (int i = 0; i < 30; i++) {
      LmContext h = RandomSeq(rng, 3, 4);
      for (int32_t s : {a, b, c, kEos}) CHECK(std::abs(lm.Prob(h, s) - back.Prob(h, s)) < 1e-9);
    }
    CHECK(WriteArpa(back) == WriteArpa(lm));
  }
}

TEST_CASE("ARPA parse errors") {
  std::string text = WriteArpa(EstimateNGram(HandFixture(), 2, Abc()));
  std::string truncated = text.substr(0, text.find("\\end\\"));
  try {
    ReadArpa(truncated, Abc());
    FAIL("expected ParseError");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("\\2-grams:") != std::string::npos);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  std::string bad = text;
  bad.replace(bad.find("\ta"), 2, "\tq");
  CHECK(KindOf([&] { ReadArpa(bad, Abc()); }) == ErrorKind::kParse);
}

TEST_CASE("corpus and manifest files") {
  auto corpus = LoadCorpus("a b\n\nc\n", Abc());
  CHECK(corpus == std::vector<PhoneSeq>{{a, b}, {c}});
  CHECK(LoadCorpus(WriteCorpus(corpus, Abc()), Abc()) == corpus);
  auto manifest = LoadManifest("paired.txt\t10\nunpaired.txt\t0.2\n");
  REQUIRE(manifest.size() == 2);
  CHECK(manifest[0].path == "paired.txt");
  CHECK(manifest[1].weight == 0.2);
  CHECK(KindOf([] { LoadManifest("x.txt\t-1\n"); }) == ErrorKind::kMalformedLine);
  CHECK(KindOf([] { LoadManifest("x.txt\n"); }) == ErrorKind::kMalformedLine);
}
