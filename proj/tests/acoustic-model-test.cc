// tests/acoustic-model-test.cc

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

#include "oracles.h"
#include "xlmmi/acoustic-model.h"
#include "xlmmi/error.h"
#include "xlmmi/graph-compiler.h"
#include "xlmmi/phone-lm.h"
#include "xlmmi/trainer.h"

namespace xlmmi {
namespace {

using testing::MaxRelativeError;
using testing::RandomEmissions;

// Visits every parameter of the encoder and of `head`, in a fixed order.
template <typename Model, typename F>
void ForEachParam(Model &model, const std::string &head, F &&f) {
  auto layer = [&](auto &l) {
    for (Eigen::Index i = 0; i < l.weight.size(); i++) f(l.weight.data()[i]);
    for (Eigen::Index i = 0; i < l.bias.size(); i++) f(l.bias.data()[i]);
  };
  for (auto &l : model.mutable_encoder()) layer(l);
  layer(model.MutableHead(head));
}

std::vector<double> Flatten(const ModelGradient &g) {
  std::vector<double> out;
  auto layer = [&](const AffineLayer &l) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  };
  for (const auto &l : g.encoder) layer(l);
  layer(g.head);
  return out;
}

TEST_CASE("shapes and head management") {
  AcousticModel m = AcousticModel::Create(5, {7, 6}, 1);
  CHECK(m.InputDim() == 5);
  CHECK(m.RepresentationDim() == 6);
  m.ResetHead("a", 4, 2);
  std::mt19937_64 rng(3);
  Matrix x = RandomEmissions(rng, 9, 5);
  CHECK(m.Forward(x, "a").rows() == 9);
  CHECK(m.Forward(x, "a").cols() == 4);
  CHECK_THROWS_AS(m.Forward(Matrix::Zero(3, 4), "a"), Error);
  CHECK_THROWS_AS(m.Forward(x, "missing"), Error);

  AcousticModel identity = AcousticModel::Create(5, {}, 1);
  CHECK(identity.RepresentationDim() == 5);
  CHECK(identity.Encode(x) == x);
}

TEST_CASE("creation is seeded") {
  CHECK(AcousticModel::Create(4, {8}, 3) == AcousticModel::Create(4, {8}, 3));
  CHECK_FALSE(AcousticModel::Create(4, {8}, 3) == AcousticModel::Create(4, {8}, 4));
}

TEST_CASE("swapping heads leaves the encoder and other heads alone") {
  AcousticModel m = AcousticModel::Create(4, {8}, 1);
  m.ResetHead(kUniversalHead, 10, 2);
  const uint64_t checksum = m.EncoderChecksum();
  const AffineLayer universal = m.Head(kUniversalHead);
  m.ResetHead(kMonoHead, 6, 3);
  CHECK(m.EncoderChecksum() == checksum);
  CHECK(m.Head(kUniversalHead) == universal);
  CHECK(m.Head(kMonoHead).OutputDim() == 6);
  CHECK(m.Head(kMonoHead).InputDim() == 8);
}

TEST_CASE("a head-only update keeps the encoder checksum") {
  AcousticModel m = AcousticModel::Create(4, {8}, 1);
  m.ResetHead("h", 3, 2);
  const uint64_t before = m.EncoderChecksum();
  ModelGradient g = m.ZeroGradient("h", false);
  CHECK(g.encoder.empty());
  g.head.weight.setConstant(0.1);
  g.head.bias.setConstant(-0.2);
  const AffineLayer head_before = m.Head("h");
  m.ApplyGradient("h", g, 0.5, 0.0);
  CHECK(m.EncoderChecksum() == before);
  CHECK_FALSE(m.Head("h") == head_before);

  ModelGradient full = m.ZeroGradient("h", true);
  full.encoder[0].weight(0, 0) = 1.0;
  m.ApplyGradient("h", full, 0.1, 0.0);
  CHECK(m.EncoderChecksum() != before);
}

TEST_CASE("gradient clipping rescales to the clip norm") {
  AcousticModel m = AcousticModel::Create(2, {}, 1);
  m.ResetHead("h", 1, 2);
  AffineLayer before = m.Head("h");
  ModelGradient g = m.ZeroGradient("h", true);
  g.head.weight(0, 0) = 30.0;
  g.head.bias(0) = 40.0;  // norm 50
  double norm = m.ApplyGradient("h", g, 1.0, 5.0);
  CHECK(norm == doctest::Approx(50.0));
  CHECK(m.Head("h").weight(0, 0) - before.weight(0, 0) == doctest::Approx(-3.0));
  CHECK(m.Head("h").bias(0) - before.bias(0) == doctest::Approx(-4.0));

  g.head.bias(0) = std::nan("");
  CHECK_THROWS_AS(m.ApplyGradient("h", g, 1.0, 5.0), Error);
}

TEST_CASE("parameter gradients match finite differences through the loss") {
  // 3 inputs, 4 tanh units, 3 pdfs: 16 + 15 = 31 parameters.
  std::mt19937_64 rng(17);
  PhoneInventory vocab;
  for (const char *s : {"a", "b", "c"}) vocab.Add(s);
  WeightedCorpus corpus{{{1, 2}, {2, 3, 1}, {3}}, 1.0};
  HmmTopology topo = MakeTopology(1, true, 3);
  WeightedGraph den = BuildDenominator(LmToFsa(EstimateNGram({corpus}, 1, vocab)), topo);
  WeightedGraph num = BuildNumerator({{{1}}, {{2}, {3}}}, topo);

  for (int instance = 0; instance < 5; instance++) {
    AcousticModel m = AcousticModel::Create(3, {4}, 100 + instance);
    m.ResetHead("h", 3, 200 + instance);
    Matrix x = RandomEmissions(rng, 6, 3, 1.0);
    int64_t params = 0;
    ForEachParam(m, "h", [&](double &) { params++; });
    REQUIRE(params <= 200);

    ModelGradient grad = m.ZeroGradient("h", true);
    UtteranceLossAndGradient(m, "h", x, num, den, &grad);
    std::vector<double> analytic = Flatten(grad);
    REQUIRE(static_cast<int64_t>(analytic.size()) == params);

    auto loss = [&](const AcousticModel &model) {
      return LfmmiLoss(num, den, model.Forward(x, "h")).loss;
    };
    std::vector<double> numeric;
    const double h = 1e-5;
    std::vector<double *> slots;
    ForEachParam(m, "h", [&](double &p) { slots.push_back(&p); });
    for (double *p : slots) {
      const double keep = *p;
      *p = keep + h;
      double up = loss(m);
      *p = keep - h;
      double down = loss(m);
      *p = keep;
      numeric.push_back((up - down) / (2 * h));
    }
    Matrix a = Eigen::Map<Matrix>(analytic.data(), 1, params);
    Matrix n = Eigen::Map<Matrix>(numeric.data(), 1, params);
    CHECK(MaxRelativeError(a, n, 1e-4) <= 1e-2);
  }
}

TEST_CASE("backward accumulates into an existing gradient") {
  std::mt19937_64 rng(5);
  AcousticModel m = AcousticModel::Create(3, {4}, 1);
  m.ResetHead("h", 2, 2);
  ForwardCache cache;
  Matrix x = RandomEmissions(rng, 4, 3, 1.0);
  m.Forward(x, "h", &cache);
  Matrix d = RandomEmissions(rng, 4, 2, 1.0);
  ModelGradient once = m.ZeroGradient("h", true), twice = m.ZeroGradient("h", true);
  m.Backward("h", cache, d, &once);
  m.Backward("h", cache, d, &twice);
  m.Backward("h", cache, d, &twice);
  once.Scale(2.0);
  std::vector<double> a = Flatten(once), b = Flatten(twice);
  for (size_t i = 0; i < a.size(); i++) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("model text round trip is exact") {
  AcousticModel m = AcousticModel::Create(4, {6, 5}, 9);
  m.ResetHead(kUniversalHead, 7, 1);
  m.ResetHead(kMonoHead, 3, 2);
  m.MutableHead(kMonoHead).bias(1) = 0.1 + 0.2;  // not representable in short decimal
  AcousticModel r = ReadModel(WriteModel(m));
  CHECK(r == m);
  CHECK(r.EncoderChecksum() == m.EncoderChecksum());
  CHECK_THROWS_AS(ReadModel("XLMMI-MODEL v1 4\nencoder 2\n"), Error);
  CHECK_THROWS_AS(ReadModel("not a model\n"), Error);
}

}  // namespace
}  // namespace xlmmi
