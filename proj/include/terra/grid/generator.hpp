// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "terra/common/image.hpp"
#include "terra/grid/layout_grid.hpp"

namespace terra {

struct LatentCode {
  std::vector<float> values;
  std::uint64_t seed = 0;

  static LatentCode draw(std::uint64_t seed, int dim);
  bool operator==(const LatentCode& o) const { return values == o.values; }
};

/// One synthesis layer: optional 2x bilinear upsample, then a style-modulated
/// k x k convolution, bias and (optionally) leaky ReLU.
struct LayerSpec {
  int upsample = 1;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  bool demodulate = true;
  bool activation = true;
};

struct GeneratorConfig {
  int latent_dim = 128;
  int style_dim = 128;
  int mapping_layers = 3;
  int const_size = 32;
  int const_channels = 32;
  std::vector<LayerSpec> layers;
  int output_resolution = 256;

  /// 32x32x32 constant, three 2x upsampling stages to 256x256, final 1x1
  /// projection to 32 feature channels.
  static GeneratorConfig standard();
  /// Same topology at 1/8 scale (4x4 constant -> 32x32). Used by tests that
  /// need many syntheses.
  static GeneratorConfig small();

  int output_channels() const { return layers.empty() ? const_channels : layers.back().out_channels; }
  bool operator==(const GeneratorConfig&) const = default;
};

bool operator==(const LayerSpec& a, const LayerSpec& b);

enum class Padding { circular, zero };

/// Layer weights after style modulation (and demodulation) for one latent,
/// laid out as a (k*k*in) x out GEMM operand.
struct ModulatedLayer {
  std::vector<float> weight;
  std::vector<float> bias;
};

/// Seeded layered generator. All weights are a pure function of
/// (config, weight_seed).
class GeneratorStack {
 public:
  GeneratorStack(GeneratorConfig config, std::uint64_t weight_seed);

  const GeneratorConfig& config() const { return config_; }
  std::uint64_t weight_seed() const { return weight_seed_; }
  int output_resolution() const { return config_.output_resolution; }
  int output_channels() const { return config_.output_channels(); }
  std::size_t layer_count() const { return config_.layers.size(); }

  /// Latent -> style vector through the mapping MLP.
  std::vector<float> map_latent(const LatentCode& z) const;

  ModulatedLayer modulate(std::size_t layer, const std::vector<float>& style) const;

  /// Constant input tiled tiles_y x tiles_x times.
  FloatImage constant_block(int tiles_y, int tiles_x) const;

  /// Applies layer `layer` fully convolutionally over `input`.
  FloatImage apply_layer(std::size_t layer, const ModulatedLayer& mod, const FloatImage& input, Padding padding) const;

  /// Radius, in output cells, beyond which a border cannot influence an output
  /// cell.
  int receptive_radius() const;

  /// Output cells per pixel of the activation that feeds `layer`.
  int scale_before(std::size_t layer) const;

 private:
  struct LayerWeights {
    std::vector<float> conv;    // [out][in][k*k]
    std::vector<float> affine;  // [in][style]
    std::vector<float> bias;    // [out]
  };

  GeneratorConfig config_;
  std::uint64_t weight_seed_;
  std::vector<std::vector<float>> mapping_;  // [style][in]
  std::vector<float> constant_;              // [size][size][channels]
  std::vector<LayerWeights> layers_;
};

/// Single-latent layout synthesis with circular padding, so the grid is a
/// seamless torus and equals the periodic interior of any equal-code
/// extension.
LayoutGrid synthesize_layout(const LatentCode& z, const GeneratorStack& stack,
                             double cell_width = kDefaultCellWidth, double origin_x = 0.0, double origin_z = 0.0);

}  // namespace terra
