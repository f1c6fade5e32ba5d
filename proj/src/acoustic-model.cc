// src/acoustic-model.cc

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

#include "xlmmi/acoustic-model.h"

#include <cmath>
#include <cstring>
#include <random>

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

namespace {

AffineLayer RandomLayer(int32_t in, int32_t out, std::mt19937_64 &rng) {
  AffineLayer layer;
  layer.weight.resize(out, in);
  layer.bias = RowVector::Zero(out);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(std::max(in, 1))));
  for (Eigen::Index i = 0; i < layer.weight.size(); i++) layer.weight.data()[i] = normal(rng);
  return layer;
}

AffineLayer ZeroLike(const AffineLayer &l) {
  return {Matrix::Zero(l.weight.rows(), l.weight.cols()), RowVector::Zero(l.bias.size())};
}

void Accumulate(AffineLayer *dst, const AffineLayer &src, double scale = 1.0) {
  dst->weight += scale * src.weight;
  dst->bias += scale * src.bias;
}

}  // namespace

void ModelGradient::SetZero() {
  for (auto &l : encoder) l = ZeroLike(l);
  head = ZeroLike(head);
}

void ModelGradient::Add(const ModelGradient &other) {
  for (size_t i = 0; i < encoder.size(); i++) Accumulate(&encoder[i], other.encoder[i]);
  Accumulate(&head, other.head);
}

void ModelGradient::Scale(double s) {
  for (auto &l : encoder) {
    l.weight *= s;
    l.bias *= s;
  }
  head.weight *= s;
  head.bias *= s;
}

double ModelGradient::SquaredNorm() const {
  double n = head.weight.squaredNorm() + head.bias.squaredNorm();
  for (const auto &l : encoder) n += l.weight.squaredNorm() + l.bias.squaredNorm();
  return n;
}

AcousticModel AcousticModel::Create(int32_t input_dim, const std::vector<int32_t> &hidden,
                                    uint64_t seed) {
  if (input_dim < 1) Fail(ErrorKind::kInvalidParameter, "input dimension must be positive");
  AcousticModel model;
  model.input_dim_ = input_dim;
  std::mt19937_64 rng(seed);
  int32_t in = input_dim;
  for (int32_t width : hidden) {
    if (width < 1) Fail(ErrorKind::kInvalidParameter, "hidden widths must be positive");
    model.encoder_.push_back(RandomLayer(in, width, rng));
    in = width;
  }
  return model;
}

int32_t AcousticModel::RepresentationDim() const {
  return encoder_.empty() ? input_dim_ : encoder_.back().OutputDim();
}

void AcousticModel::ResetHead(const std::string &name, int32_t output_dim, uint64_t seed) {
  if (output_dim < 1) Fail(ErrorKind::kInvalidParameter, "head needs at least one output");
  std::mt19937_64 rng(seed);
  heads_[name] = RandomLayer(RepresentationDim(), output_dim, rng);
}

const AffineLayer &AcousticModel::Head(const std::string &name) const {
  auto it = heads_.find(name);
  if (it == heads_.end()) Fail(ErrorKind::kInvalidParameter, "no head named '" + name + "'");
  return it->second;
}

AffineLayer &AcousticModel::MutableHead(const std::string &name) {
  return const_cast<AffineLayer &>(static_cast<const AcousticModel *>(this)->Head(name));
}

Matrix AcousticModel::Encode(const Matrix &features) const {
  if (features.cols() != input_dim_)
    Fail(ErrorKind::kShapeMismatch, "features have " + std::to_string(features.cols()) +
                                        " columns, model expects " + std::to_string(input_dim_));
  Matrix a = features;
  for (const AffineLayer &l : encoder_) {
    Matrix z = a * l.weight.transpose();
    z.rowwise() += l.bias;
    a = z.array().tanh().matrix();
  }
  return a;
}

Matrix AcousticModel::Forward(const Matrix &features, const std::string &head,
                              ForwardCache *cache) const {
  const AffineLayer &h = Head(head);
  if (features.cols() != input_dim_)
    Fail(ErrorKind::kShapeMismatch, "features have " + std::to_string(features.cols()) +
                                        " columns, model expects " + std::to_string(input_dim_));
  if (cache) cache->activations.assign(1, features);
  Matrix a = features;
  for (const AffineLayer &l : encoder_) {
    Matrix z = a * l.weight.transpose();
    z.rowwise() += l.bias;
    a = z.array().tanh().matrix();
    if (cache) cache->activations.push_back(a);
  }
  Matrix e = a * h.weight.transpose();
  e.rowwise() += h.bias;
  return e;
}

void AcousticModel::Backward(const std::string &head, const ForwardCache &cache,
                             const Matrix &d_emissions, ModelGradient *grad) const {
  const AffineLayer &h = Head(head);
  const Matrix &top = cache.activations.back();
  grad->head.weight.noalias() += d_emissions.transpose() * top;
  grad->head.bias += d_emissions.colwise().sum();
  if (grad->encoder.empty()) return;
  Matrix d_a = d_emissions * h.weight;
  for (size_t i = encoder_.size(); i-- > 0;) {
    const Matrix &out = cache.activations[i + 1];
    Matrix d_z = d_a.array() * (1.0 - out.array().square());
    grad->encoder[i].weight.noalias() += d_z.transpose() * cache.activations[i];
    grad->encoder[i].bias += d_z.colwise().sum();
    if (i > 0) d_a = d_z * encoder_[i].weight;
  }
}

ModelGradient AcousticModel::ZeroGradient(const std::string &head, bool with_encoder) const {
  ModelGradient g;
  g.head = ZeroLike(Head(head));
  if (with_encoder)
    for (const AffineLayer &l : encoder_) g.encoder.push_back(ZeroLike(l));
  return g;
}

double AcousticModel::ApplyGradient(const std::string &head, ModelGradient grad, double step,
                                    double clip) {
  const double norm = std::sqrt(grad.SquaredNorm());
  if (!std::isfinite(norm)) Fail(ErrorKind::kDivergedLoss, "non-finite gradient");
  if (clip > 0 && norm > clip) grad.Scale(clip / norm);
  Accumulate(&MutableHead(head), grad.head, -step);
  for (size_t i = 0; i < grad.encoder.size(); i++) Accumulate(&encoder_[i], grad.encoder[i], -step);
  return norm;
}

uint64_t AcousticModel::EncoderChecksum() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const double *data, Eigen::Index n) {
    const unsigned char *bytes = reinterpret_cast<const unsigned char *>(data);
    for (size_t i = 0; i < static_cast<size_t>(n) * sizeof(double); i++) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const AffineLayer &l : encoder_) {
    mix(l.weight.data(), l.weight.size());
    mix(l.bias.data(), l.bias.size());
  }
  return h;
}

namespace {

void WriteLayer(const std::string &tag, const AffineLayer &l, std::string *out) {
  *out += tag + " " + std::to_string(l.OutputDim()) + " " + std::to_string(l.InputDim()) + "\n";
  for (Eigen::Index r = 0; r < l.weight.rows(); r++) {
    for (Eigen::Index c = 0; c < l.weight.cols(); c++)
      *out += (c ? " " : "") + FormatDouble(l.weight(r, c));
    *out += "\n";
  }
  for (Eigen::Index c = 0; c < l.bias.size(); c++) *out += (c ? " " : "") + FormatDouble(l.bias(c));
  *out += "\n";
}

}  // namespace

std::string WriteModel(const AcousticModel &model) {
  std::string out = "XLMMI-MODEL v1 " + std::to_string(model.InputDim()) + "\n";
  for (const AffineLayer &l : model.encoder()) WriteLayer("encoder", l, &out);
  for (const auto &[name, l] : model.heads()) WriteLayer("head " + name, l, &out);
  return out;
}

AcousticModel ReadModel(std::string_view text) {
  auto lines = SplitLines(text);
  size_t i = 0;
  auto fail = [&](const std::string &msg) {
    Fail(ErrorKind::kParse, "line " + std::to_string(i + 1) + ": " + msg);
  };
  auto parse_int = [&](std::string_view s) {
    auto v = ParseDouble(s);
    if (!v || *v < 1 || *v != std::floor(*v)) fail("expected a positive integer");
    return static_cast<int32_t>(*v);
  };
  auto row = [&](Eigen::Index n) {
    if (i >= lines.size()) fail("unexpected end of model");
    auto f = SplitWhitespace(lines[i]);
    if (static_cast<Eigen::Index>(f.size()) != n) fail("expected " + std::to_string(n) + " values");
    std::vector<double> v;
    for (auto x : f) {
      auto d = ParseDouble(x);
      if (!d || !std::isfinite(*d)) fail("bad value");
      v.push_back(*d);
    }
    i++;
    return v;
  };
  if (lines.empty()) fail("empty model");
  auto header = SplitWhitespace(lines[0]);
  if (header.size() != 3 || header[0] != "XLMMI-MODEL" || header[1] != "v1")
    fail("expected 'XLMMI-MODEL v1 <input-dim>'");
  int32_t input_dim = parse_int(header[2]);
  AcousticModel model = AcousticModel::Create(input_dim, {}, 0);
  i = 1;
  int32_t in = input_dim;
  while (i < lines.size()) {
    if (StripWhitespace(lines[i]).empty()) {
      i++;
      continue;
    }
    auto f = SplitWhitespace(lines[i]);
    bool is_head = f.size() == 4 && f[0] == "head";
    if (!is_head && !(f.size() == 3 && f[0] == "encoder")) fail("expected a layer header");
    int32_t rows = parse_int(f[is_head ? 2 : 1]), cols = parse_int(f[is_head ? 3 : 2]);
    std::string name = is_head ? std::string(f[1]) : "";
    i++;
    AffineLayer layer{Matrix(rows, cols), RowVector(rows)};
    for (int32_t r = 0; r < rows; r++) {
      auto v = row(cols);
      for (int32_t c = 0; c < cols; c++) layer.weight(r, c) = v[c];
    }
    auto b = row(rows);
    for (int32_t r = 0; r < rows; r++) layer.bias(r) = b[r];
    if (is_head) {
      if (cols != model.RepresentationDim()) fail("head input size does not match the encoder");
      model.ResetHead(name, rows, 0);
      model.MutableHead(name) = layer;
    } else {
      if (!model.heads().empty()) fail("encoder layer after a head");
      if (cols != in) fail("encoder layer input size mismatch");
      model.mutable_encoder().push_back(layer);
      in = rows;
    }
  }
  return model;
}

}  // namespace xlmmi
