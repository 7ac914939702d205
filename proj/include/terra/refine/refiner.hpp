// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "terra/common/image.hpp"
#include "terra/decoder/weight_file.hpp"
#include "terra/render/renderer.hpp"

namespace terra {

struct RefinedBuffers {
  FloatImage rgb;        // 3
  FloatImage disparity;  // 1, >= 0
  FloatImage mask;       // 1, in [0, 1]

  bool operator==(const RefinedBuffers&) const = default;
};

class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual std::string kind() const = 0;
  virtual int factor() const = 0;
  virtual RefinedBuffers refine(const RenderBuffers& lr) const = 0;
};

/// Bilinear upsample of rgb, disparity and mask; ignores the feature image.
class IdentityRefiner final : public Refiner {
 public:
  explicit IdentityRefiner(int factor = 8);
  std::string kind() const override { return "identity"; }
  int factor() const override { return factor_; }
  RefinedBuffers refine(const RenderBuffers& lr) const override;

 private:
  int factor_;
};

/// Seeded convolutional upsampler. Input is the feature image concatenated
/// with rgb, disparity and mask; each stage is a 2x bilinear upsample (except
/// the first), a 3x3 convolution, projected-noise injection and leaky ReLU.
/// 1x1 skip heads add rgb/disparity/mask residuals onto the upsampled
/// low-resolution buffers.
class ConvRefiner final : public Refiner {
 public:
  struct Stage {
    int in = 0;
    int out = 0;
    std::vector<float> weight;       // [9 * in][out]
    std::vector<float> bias;         // [out]
    std::vector<float> noise_scale;  // [out]
    std::vector<float> head;         // [out][5]
    std::vector<float> head_bias;    // [5]
  };

  static ConvRefiner seeded(int feature_channels, std::uint64_t seed, int factor = 8);
  static ConvRefiner from_container(const WeightContainer& c);
  WeightContainer to_container() const;

  std::string kind() const override { return "conv"; }
  int factor() const override { return 1 << (static_cast<int>(stages_.size()) - 1); }
  RefinedBuffers refine(const RenderBuffers& lr) const override;

  int feature_channels() const { return feature_channels_; }
  const std::vector<Stage>& stages() const { return stages_; }

 private:
  int feature_channels_ = 0;
  std::vector<Stage> stages_;
};

/// Adds scale[c] * noise (bilinearly resized to the activation size) to
/// channel c of the activations.
void inject_noise(FloatImage& activations, const FloatImage& noise, std::span<const float> scales);

struct RefinementLosses {
  double consistency = 0.0;
  double sky = 0.0;
};

struct LossWeights {
  double consistency = 5.0;
  double sky = 100.0;
};

/// consistency = mean|D_HR - up(D_LR)| + mean|M_HR - up(M_LR)|;
/// sky = mean exp(-20 sum_c |I_HR[c]|) * M_HR.
RefinementLosses refinement_losses(const RenderBuffers& lr, const RefinedBuffers& hr);

}  // namespace terra
