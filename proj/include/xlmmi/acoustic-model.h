// include/xlmmi/acoustic-model.h

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

#ifndef XLMMI_ACOUSTIC_MODEL_H_
#define XLMMI_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xlmmi/lfmmi.h"

namespace xlmmi {

using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// y = x * weight^T + bias, with weight stored out x in.
struct AffineLayer {
  Matrix weight;
  RowVector bias;

  int32_t InputDim() const { return static_cast<int32_t>(weight.cols()); }
  int32_t OutputDim() const { return static_cast<int32_t>(weight.rows()); }
  int64_t NumParams() const { return weight.size() + bias.size(); }
  bool operator==(const AffineLayer &o) const { return weight == o.weight && bias == o.bias; }
};

// Activations kept by Forward() for the backward pass.
struct ForwardCache {
  std::vector<Matrix> activations;  // input, then the output of each tanh layer
};

struct ModelGradient {
  std::vector<AffineLayer> encoder;  // empty when the encoder is not trained
  AffineLayer head;

  void SetZero();
  void Add(const ModelGradient &other);
  void Scale(double s);
  double SquaredNorm() const;
};

// Feed-forward acoustic model: a tanh MLP encoder shared by any number of
// named affine output heads.
class AcousticModel {
 public:
  AcousticModel() = default;

  // Hidden widths may be empty, making the encoder the identity.
  static AcousticModel Create(int32_t input_dim, const std::vector<int32_t> &hidden,
                              uint64_t seed);

  int32_t InputDim() const { return input_dim_; }
  int32_t RepresentationDim() const;

  // Adds, or re-initializes, a head with `output_dim` outputs.
  void ResetHead(const std::string &name, int32_t output_dim, uint64_t seed);
  bool HasHead(const std::string &name) const { return heads_.count(name) != 0; }
  const AffineLayer &Head(const std::string &name) const;
  AffineLayer &MutableHead(const std::string &name);
  const std::map<std::string, AffineLayer> &heads() const { return heads_; }

  const std::vector<AffineLayer> &encoder() const { return encoder_; }
  std::vector<AffineLayer> &mutable_encoder() { return encoder_; }

  Matrix Encode(const Matrix &features) const;
  // T x P emission scores of head `name`. Throws kShapeMismatch.
  Matrix Forward(const Matrix &features, const std::string &head, ForwardCache *cache = nullptr) const;

  // Accumulates parameter gradients for d loss / d emissions into `grad`;
  // encoder gradients only if grad->encoder is non-empty.
  void Backward(const std::string &head, const ForwardCache &cache, const Matrix &d_emissions,
                ModelGradient *grad) const;

  ModelGradient ZeroGradient(const std::string &head, bool with_encoder) const;

  // Gradient step; rescales `grad` first if its norm exceeds `clip`
  // (clip <= 0 disables). Returns the pre-clipping norm.
  double ApplyGradient(const std::string &head, ModelGradient grad, double step, double clip);

  // FNV-1a over the bytes of every encoder parameter.
  uint64_t EncoderChecksum() const;

  bool operator==(const AcousticModel &o) const {
    return input_dim_ == o.input_dim_ && encoder_ == o.encoder_ && heads_ == o.heads_;
  }

 private:
  int32_t input_dim_ = 0;
  std::vector<AffineLayer> encoder_;
  std::map<std::string, AffineLayer> heads_;
};

// Text serialization with exact round trip.
std::string WriteModel(const AcousticModel &model);
AcousticModel ReadModel(std::string_view text);

}  // namespace xlmmi

#endif  // XLMMI_ACOUSTIC_MODEL_H_
