// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "terra/decoder/weight_file.hpp"

namespace terra {

struct DecoderConfig {
  int feature_dim = 32;
  int hidden = 256;
  int layers = 8;
  int color_dim = 128;
  /// Density is density_scale * max(sharpness * (amplitude * tanh(head) - y), 0):
  /// solid below y = -amplitude, empty above y = +amplitude.
  float surface_amplitude = 0.8f;
  float sharpness = 8.0f;
  float density_scale = 5.0f;

  bool operator==(const DecoderConfig&) const = default;
};

/// Style-modulated MLP. Layer l maps h to lrelu((h * (1 + A_l f)) W_l + b_l);
/// the first layer's input is the height y.
class DecoderWeights {
 public:
  struct Layer {
    int in = 0;
    int out = 0;
    std::vector<float> weight;  // [in][out]
    std::vector<float> bias;    // [out]
    std::vector<float> affine;  // [feature_dim][in]
  };

  static DecoderWeights seeded(const DecoderConfig& config, std::uint64_t seed);
  static DecoderWeights from_container(const WeightContainer& c);
  WeightContainer to_container() const;

  const DecoderConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& color_head() const { return color_; }
  const Layer& density_head() const { return density_; }

 private:
  DecoderConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<Layer> layers_;
  Layer color_;    // hidden -> color_dim, modulated
  Layer density_;  // hidden -> 1, unmodulated
};

struct DecodedSample {
  std::vector<float> color_feature;
  float density = 0.0f;
};

/// Decodes `count` samples: features[count x feature_dim], ys[count] ->
/// color[count x color_dim], sigma[count]. Rows are independent, so results do
/// not depend on batch composition.
void decode_batch(const DecoderWeights& w, std::size_t count, const float* features, const float* ys, float* color,
                  float* sigma);

/// Single-sample decode through the batch path.
DecodedSample decode_point(std::span<const float> feature, double y, const DecoderWeights& w);

/// Double-precision scalar reference with forward-mode dsigma/dy.
struct ReferenceSample {
  std::vector<double> color_feature;
  double density = 0.0;
  double density_dy = 0.0;
};
ReferenceSample decode_point_reference(std::span<const float> feature, double y, const DecoderWeights& w);

}  // namespace terra
