// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/grid/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {
namespace {

constexpr float kLeakySlope = 0.2f;
const float kLeakyGain = std::numbers::sqrt2_v<float>;

enum Tensor : std::int64_t { kConv = 0, kAffine = 1, kBias = 2 };
constexpr std::int64_t kMappingTag = 1000;
constexpr std::int64_t kConstantTag = 2000;
constexpr std::int64_t kLatentTag = 3000;

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

FloatImage upsample2x(const FloatImage& in, Padding padding) {
  FloatImage out(in.width * 2, in.height * 2, in.channels);
  auto index = [&](int i, int n) { return padding == Padding::circular ? wrap(i, n) : std::clamp(i, 0, n - 1); };
  for (int y = 0; y < out.height; ++y) {
    // Output center (y + 0.5) / 2 - 0.5 in input pixels: taps at floor and
    // floor + 1 with weights 0.75 / 0.25 alternating.
    const int ya = (y % 2 == 0) ? y / 2 - 1 : y / 2;
    const float wy_a = (y % 2 == 0) ? 0.25f : 0.75f;
    const int y0 = index(ya, in.height);
    const int y1 = index(ya + 1, in.height);
    for (int x = 0; x < out.width; ++x) {
      const int xa = (x % 2 == 0) ? x / 2 - 1 : x / 2;
      const float wx_a = (x % 2 == 0) ? 0.25f : 0.75f;
      const int x0 = index(xa, in.width);
      const int x1 = index(xa + 1, in.width);
      const float w[4] = {wy_a * wx_a, wy_a * (1.0f - wx_a), (1.0f - wy_a) * wx_a, (1.0f - wy_a) * (1.0f - wx_a)};
      simd::kernels().lerp4(in.channels, w, in.pixel(x0, y0).data(), in.pixel(x1, y0).data(),
                            in.pixel(x0, y1).data(), in.pixel(x1, y1).data(), out.pixel(x, y).data());
    }
  }
  return out;
}

}  // namespace

LatentCode LatentCode::draw(std::uint64_t seed, int dim) {
  require(dim >= 1, ErrorCode::configuration, "latent dimension must be positive");
  LatentCode z;
  z.seed = seed;
  z.values.resize(static_cast<std::size_t>(dim));
  CounterRng(CounterRng::derive(seed, {kLatentTag})).fill_gaussian(z.values, 1.0);
  return z;
}

bool operator==(const LayerSpec& a, const LayerSpec& b) {
  return a.upsample == b.upsample && a.in_channels == b.in_channels && a.out_channels == b.out_channels &&
         a.kernel == b.kernel && a.demodulate == b.demodulate && a.activation == b.activation;
}

GeneratorConfig GeneratorConfig::standard() {
  GeneratorConfig c;
  c.const_size = 32;
  c.const_channels = 32;
  c.layers = {
      {1, 32, 32, 3, true, true}, {1, 32, 32, 3, true, true}, {2, 32, 16, 3, true, true},
      {2, 16, 8, 3, true, true},  {2, 8, 8, 3, true, true},   {1, 8, 32, 1, false, false},
  };
  c.output_resolution = 256;
  return c;
}

GeneratorConfig GeneratorConfig::small() {
  GeneratorConfig c;
  c.latent_dim = 32;
  c.style_dim = 32;
  c.const_size = 8;
  c.const_channels = 16;
  c.layers = {
      {1, 16, 16, 3, true, true},
      {2, 16, 16, 3, true, true},
      {2, 16, 8, 3, true, true},
      {1, 8, 32, 1, false, false},
  };
  c.output_resolution = 32;
  return c;
}

GeneratorStack::GeneratorStack(GeneratorConfig config, std::uint64_t weight_seed)
    : config_(std::move(config)), weight_seed_(weight_seed) {
  const auto& c = config_;
  require(c.latent_dim >= 1 && c.style_dim >= 1 && c.mapping_layers >= 1, ErrorCode::configuration,
          "generator mapping dimensions must be positive");
  require(c.const_size >= 2 && c.const_channels >= 1, ErrorCode::configuration, "invalid constant block");
  int res = c.const_size;
  int channels = c.const_channels;
  for (std::size_t l = 0; l < c.layers.size(); ++l) {
    const LayerSpec& s = c.layers[l];
    require(s.upsample == 1 || s.upsample == 2, ErrorCode::configuration, "layer upsample must be 1 or 2");
    require(s.kernel >= 1 && s.kernel % 2 == 1, ErrorCode::configuration, "layer kernel must be odd");
    require(s.in_channels == channels, ErrorCode::configuration,
            "layer " + std::to_string(l) + " expects " + std::to_string(s.in_channels) + " channels, gets " +
                std::to_string(channels));
    require(s.out_channels >= 1, ErrorCode::configuration, "layer output channels must be positive");
    res *= s.upsample;
    channels = s.out_channels;
  }
  require(res == c.output_resolution, ErrorCode::configuration,
          "layer upsampling composes to " + std::to_string(res) + ", expected " +
              std::to_string(c.output_resolution));

  for (int l = 0; l < c.mapping_layers; ++l) {
    const int in = l == 0 ? c.latent_dim : c.style_dim;
    std::vector<float> w(static_cast<std::size_t>(c.style_dim) * in);
    CounterRng(CounterRng::derive(weight_seed, {kMappingTag, l})).fill_gaussian(w, 1.0 / std::sqrt(in));
    mapping_.push_back(std::move(w));
  }
  constant_.resize(static_cast<std::size_t>(c.const_size) * c.const_size * c.const_channels);
  CounterRng(CounterRng::derive(weight_seed, {kConstantTag})).fill_gaussian(constant_, 1.0);

  for (std::size_t l = 0; l < c.layers.size(); ++l) {
    const LayerSpec& s = c.layers[l];
    const auto li = static_cast<std::int64_t>(l);
    LayerWeights lw;
    const int taps = s.kernel * s.kernel;
    lw.conv.resize(static_cast<std::size_t>(s.out_channels) * s.in_channels * taps);
    const double conv_scale = s.demodulate ? 1.0 : 1.0 / std::sqrt(static_cast<double>(s.in_channels) * taps);
    CounterRng(CounterRng::derive(weight_seed, {li, kConv})).fill_gaussian(lw.conv, conv_scale);
    lw.affine.resize(static_cast<std::size_t>(s.in_channels) * c.style_dim);
    CounterRng(CounterRng::derive(weight_seed, {li, kAffine})).fill_gaussian(lw.affine, 0.5 / std::sqrt(c.style_dim));
    lw.bias.resize(static_cast<std::size_t>(s.out_channels));
    CounterRng(CounterRng::derive(weight_seed, {li, kBias})).fill_gaussian(lw.bias, 0.1);
    layers_.push_back(std::move(lw));
  }
}

std::vector<float> GeneratorStack::map_latent(const LatentCode& z) const {
  const auto& c = config_;
  require(static_cast<int>(z.values.size()) == c.latent_dim, ErrorCode::configuration,
          "latent dimension " + std::to_string(z.values.size()) + " does not match generator latent dimension " +
              std::to_string(c.latent_dim));
  double sq = 0.0;
  for (float v : z.values) sq += static_cast<double>(v) * v;
  const double norm = 1.0 / std::sqrt(sq / c.latent_dim + 1e-8);
  std::vector<double> x(z.values.begin(), z.values.end());
  for (double& v : x) v *= norm;
  for (const auto& w : mapping_) {
    const std::size_t in = x.size();
    std::vector<double> y(static_cast<std::size_t>(c.style_dim), 0.0);
    for (int o = 0; o < c.style_dim; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * x[i];
      y[o] = (acc >= 0.0 ? acc : acc * kLeakySlope) * kLeakyGain;
    }
    x = std::move(y);
  }
  return {x.begin(), x.end()};
}

ModulatedLayer GeneratorStack::modulate(std::size_t layer, const std::vector<float>& style) const {
  const LayerSpec& s = config_.layers.at(layer);
  const LayerWeights& lw = layers_[layer];
  const int taps = s.kernel * s.kernel;
  require(static_cast<int>(style.size()) == config_.style_dim, ErrorCode::configuration, "style dimension mismatch");

  std::vector<double> mod(static_cast<std::size_t>(s.in_channels));
  for (int i = 0; i < s.in_channels; ++i) {
    double acc = 1.0;
    for (int j = 0; j < config_.style_dim; ++j) acc += static_cast<double>(lw.affine[i * config_.style_dim + j]) * style[j];
    mod[i] = acc;
  }
  ModulatedLayer out;
  out.weight.assign(static_cast<std::size_t>(taps) * s.in_channels * s.out_channels, 0.0f);
  out.bias = lw.bias;
  for (int o = 0; o < s.out_channels; ++o) {
    double demod = 1.0;
    if (s.demodulate) {
      double sq = 0.0;
      for (int i = 0; i < s.in_channels; ++i)
        for (int t = 0; t < taps; ++t) {
          const double w = lw.conv[(static_cast<std::size_t>(o) * s.in_channels + i) * taps + t] * mod[i];
          sq += w * w;
        }
      demod = 1.0 / std::sqrt(sq + 1e-8);
    }
    for (int i = 0; i < s.in_channels; ++i)
      for (int t = 0; t < taps; ++t) {
        const double w = lw.conv[(static_cast<std::size_t>(o) * s.in_channels + i) * taps + t] * mod[i] * demod;
        out.weight[(static_cast<std::size_t>(t) * s.in_channels + i) * s.out_channels + o] = static_cast<float>(w);
      }
  }
  return out;
}

FloatImage GeneratorStack::constant_block(int tiles_y, int tiles_x) const {
  const int n = config_.const_size;
  const int ch = config_.const_channels;
  FloatImage out(n * tiles_x, n * tiles_y, ch);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      std::copy_n(constant_.data() + (static_cast<std::size_t>(y % n) * n + x % n) * ch, ch, out.pixel(x, y).data());
  return out;
}

FloatImage GeneratorStack::apply_layer(std::size_t layer, const ModulatedLayer& mod, const FloatImage& input,
                                       Padding padding) const {
  const LayerSpec& s = config_.layers.at(layer);
  require(input.channels == s.in_channels, ErrorCode::configuration,
          "layer " + std::to_string(layer) + " input has " + std::to_string(input.channels) + " channels, expected " +
              std::to_string(s.in_channels));
  const FloatImage src = s.upsample == 2 ? upsample2x(input, padding) : input;
  const int w = src.width;
  const int h = src.height;
  const int cin = s.in_channels;
  const int cout = s.out_channels;
  const int radius = s.kernel / 2;
  const int patch = s.kernel * s.kernel * cin;
  FloatImage out(w, h, cout);
  const auto& k = simd::kernels();

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::vector<float> cols(static_cast<std::size_t>(w) * patch, 0.0f);
    for (int x = 0; x < w; ++x) {
      float* dst = cols.data() + static_cast<std::size_t>(x) * patch;
      int t = 0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx, ++t) {
          int sy = y + dy;
          int sx = x + dx;
          if (padding == Padding::circular) {
            sy = wrap(sy, h);
            sx = wrap(sx, w);
          } else if (sy < 0 || sy >= h || sx < 0 || sx >= w) {
            continue;  // zero padding: cols already zeroed
          }
          std::copy_n(src.pixel(sx, sy).data(), cin, dst + static_cast<std::size_t>(t) * cin);
        }
    }
    float* orow = out.data.data() + static_cast<std::size_t>(y) * w * cout;
    for (int x = 0; x < w; ++x) std::copy(mod.bias.begin(), mod.bias.end(), orow + static_cast<std::size_t>(x) * cout);
    k.gemm(w, cout, patch, cols.data(), patch, mod.weight.data(), cout, orow, cout, true);
    if (s.activation) k.leaky_relu(w * cout, kLeakySlope, kLeakyGain, orow);
  });
  return out;
}

int GeneratorStack::scale_before(std::size_t layer) const {
  int res = config_.const_size;
  for (std::size_t l = 0; l < layer; ++l) res *= config_.layers[l].upsample;
  return config_.output_resolution / res;
}

int GeneratorStack::receptive_radius() const {
  int radius = 0;
  int res = config_.const_size;
  for (const LayerSpec& s : config_.layers) {
    if (s.upsample == 2) {
      radius += config_.output_resolution / res;  // one input pixel of bilinear reach
      res *= 2;
    }
    radius += (s.kernel / 2) * (config_.output_resolution / res);
  }
  return radius;
}

LayoutGrid synthesize_layout(const LatentCode& z, const GeneratorStack& stack, double cell_width, double origin_x,
                             double origin_z) {
  const std::vector<float> style = stack.map_latent(z);
  FloatImage f = stack.constant_block(1, 1);
  for (std::size_t l = 0; l < stack.layer_count(); ++l)
    f = stack.apply_layer(l, stack.modulate(l, style), f, Padding::circular);
  return LayoutGrid(f.height, f.width, f.channels, std::move(f.data), cell_width, origin_x, origin_z,
                    GridProvenance::single_latent);
}

}  // namespace terra
