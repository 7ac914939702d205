// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/decoder/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {
namespace {

constexpr float kSlope = 0.2f;
const float kGain = std::numbers::sqrt2_v<float>;
constexpr double kStyleStrength = 0.5;
constexpr std::size_t kBlock = 64;

enum Tag : std::int64_t { kWeight = 0, kBias = 1, kAffine = 2 };
constexpr std::int64_t kColorTag = 100;
constexpr std::int64_t kDensityTag = 101;

std::vector<float> gaussian(std::uint64_t seed, std::int64_t layer, std::int64_t tensor, std::size_t n,
                            double scale) {
  std::vector<float> v(n);
  CounterRng(CounterRng::derive(seed, {layer, tensor})).fill_gaussian(v, scale);
  return v;
}

DecoderWeights::Layer make_layer(std::uint64_t seed, std::int64_t tag, int in, int out, int feature_dim,
                                 double weight_scale, double bias_scale, bool modulated) {
  DecoderWeights::Layer l;
  l.in = in;
  l.out = out;
  l.weight = gaussian(seed, tag, kWeight, static_cast<std::size_t>(in) * out, weight_scale);
  l.bias = bias_scale > 0 ? gaussian(seed, tag, kBias, static_cast<std::size_t>(out), bias_scale)
                          : std::vector<float>(static_cast<std::size_t>(out), 0.0f);
  if (modulated)
    l.affine = gaussian(seed, tag, kAffine, static_cast<std::size_t>(feature_dim) * in,
                        kStyleStrength / std::sqrt(static_cast<double>(feature_dim)));
  return l;
}


void put_layer(WeightContainer& c, const std::string& prefix, const DecoderWeights::Layer& l, int feature_dim) {
  const auto in = static_cast<std::uint32_t>(l.in);
  const auto out = static_cast<std::uint32_t>(l.out);
  c.add(prefix + ".weight", {in, out}, l.weight);
  c.add(prefix + ".bias", {out}, l.bias);
  if (!l.affine.empty()) c.add(prefix + ".affine", {static_cast<std::uint32_t>(feature_dim), in}, l.affine);
}

DecoderWeights::Layer get_layer(const WeightContainer& c, const std::string& prefix, int in, int out, int feature_dim,
                                bool modulated) {
  DecoderWeights::Layer l;
  l.in = in;
  l.out = out;
  const auto uin = static_cast<std::uint32_t>(in);
  const auto uout = static_cast<std::uint32_t>(out);
  l.weight = c.get(prefix + ".weight", {uin, uout}).data;
  l.bias = c.get(prefix + ".bias", {uout}).data;
  if (modulated) l.affine = c.get(prefix + ".affine", {static_cast<std::uint32_t>(feature_dim), uin}).data;
  return l;
}

float config_scalar(const WeightContainer& c, const std::string& name) { return c.get(name, {1}).data[0]; }

}  // namespace

DecoderWeights DecoderWeights::seeded(const DecoderConfig& config, std::uint64_t seed) {
  require(config.feature_dim >= 1 && config.hidden >= 1 && config.layers >= 1 && config.color_dim >= 1,
          ErrorCode::configuration, "decoder dimensions must be positive");
  DecoderWeights w;
  w.config_ = config;
  w.seed_ = seed;
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? 1 : config.hidden;
    // The first layer sees the raw height; its kinks spread over the terrain band.
    const double ws = l == 0 ? 1.0 : 1.0 / std::sqrt(static_cast<double>(in));
    const double bs = l == 0 ? 0.5 : 0.1;
    w.layers_.push_back(make_layer(seed, l, in, config.hidden, config.feature_dim, ws, bs, true));
  }
  const double hs = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  w.color_ = make_layer(seed, kColorTag, config.hidden, config.color_dim, config.feature_dim, hs, 0.0, true);
  w.density_ = make_layer(seed, kDensityTag, config.hidden, 1, config.feature_dim, hs, 0.1, false);
  return w;
}

WeightContainer DecoderWeights::to_container() const {
  WeightContainer c;
  c.kind = "decoder";
  c.add("config.feature_dim", {1}, {static_cast<float>(config_.feature_dim)});
  c.add("config.hidden", {1}, {static_cast<float>(config_.hidden)});
  c.add("config.layers", {1}, {static_cast<float>(config_.layers)});
  c.add("config.color_dim", {1}, {static_cast<float>(config_.color_dim)});
  c.add("config.surface_amplitude", {1}, {config_.surface_amplitude});
  c.add("config.sharpness", {1}, {config_.sharpness});
  c.add("config.density_scale", {1}, {config_.density_scale});
  for (std::size_t l = 0; l < layers_.size(); ++l)
    put_layer(c, "layer" + std::to_string(l), layers_[l], config_.feature_dim);
  put_layer(c, "color", color_, config_.feature_dim);
  put_layer(c, "density", density_, config_.feature_dim);
  return c;
}

DecoderWeights DecoderWeights::from_container(const WeightContainer& c) {
  require(c.kind == "decoder", ErrorCode::configuration, "expected decoder weights, got '" + c.kind + "'");
  DecoderWeights w;
  DecoderConfig& cfg = w.config_;
  cfg.feature_dim = static_cast<int>(config_scalar(c, "config.feature_dim"));
  cfg.hidden = static_cast<int>(config_scalar(c, "config.hidden"));
  cfg.layers = static_cast<int>(config_scalar(c, "config.layers"));
  cfg.color_dim = static_cast<int>(config_scalar(c, "config.color_dim"));
  cfg.surface_amplitude = config_scalar(c, "config.surface_amplitude");
  cfg.sharpness = config_scalar(c, "config.sharpness");
  cfg.density_scale = config_scalar(c, "config.density_scale");
  require(cfg.feature_dim >= 1 && cfg.hidden >= 1 && cfg.layers >= 1 && cfg.color_dim >= 1,
          ErrorCode::configuration, "decoder dimensions must be positive");
  for (int l = 0; l < cfg.layers; ++l)
    w.layers_.push_back(
        get_layer(c, "layer" + std::to_string(l), l == 0 ? 1 : cfg.hidden, cfg.hidden, cfg.feature_dim, true));
  w.color_ = get_layer(c, "color", cfg.hidden, cfg.color_dim, cfg.feature_dim, true);
  w.density_ = get_layer(c, "density", cfg.hidden, 1, cfg.feature_dim, false);
  return w;
}

void decode_batch(const DecoderWeights& w, std::size_t count, const float* features, const float* ys, float* color,
                  float* sigma) {
  const auto& cfg = w.config();
  const auto& k = simd::kernels();
  const int fd = cfg.feature_dim;
  const int hd = cfg.hidden;
  thread_local std::vector<float> h, next, style;
  const std::size_t width = static_cast<std::size_t>(std::max(hd, cfg.color_dim));
  h.resize(kBlock * width);
  next.resize(kBlock * width);
  style.resize(kBlock * width);

  for (std::size_t base = 0; base < count; base += kBlock) {
    const int b = static_cast<int>(std::min(kBlock, count - base));
    const float* f = features + base * fd;
    for (int r = 0; r < b; ++r) h[r] = ys[base + r];
    int in = 1;

    auto modulated = [&](const DecoderWeights::Layer& layer, float* out) {
      std::fill_n(style.data(), static_cast<std::size_t>(b) * in, 1.0f);
      k.gemm(b, in, fd, f, fd, layer.affine.data(), in, style.data(), in, true);
      k.mul(b * in, style.data(), h.data());
      for (int r = 0; r < b; ++r) std::copy(layer.bias.begin(), layer.bias.end(), out + static_cast<std::size_t>(r) * layer.out);
      k.gemm(b, layer.out, in, h.data(), in, layer.weight.data(), layer.out, out, layer.out, true);
    };

    for (const auto& layer : w.layers()) {
      modulated(layer, next.data());
      k.leaky_relu(b * layer.out, kSlope, kGain, next.data());
      std::swap(h, next);
      in = layer.out;
    }

    // Density head reads the unmodulated hidden state, so compute it first.
    const auto& dh = w.density_head();
    for (int r = 0; r < b; ++r) next[r] = dh.bias[0];
    k.gemm(b, 1, hd, h.data(), hd, dh.weight.data(), 1, next.data(), 1, true);
    for (int r = 0; r < b; ++r) {
      const double y = ys[base + r];
      const double surface = cfg.surface_amplitude * std::tanh(static_cast<double>(next[r]));
      sigma[base + r] = static_cast<float>(cfg.density_scale * std::max(cfg.sharpness * (surface - y), 0.0));
    }
    modulated(w.color_head(), color + base * cfg.color_dim);
  }
}

DecodedSample decode_point(std::span<const float> feature, double y, const DecoderWeights& w) {
  require(static_cast<int>(feature.size()) == w.config().feature_dim, ErrorCode::configuration,
          "decoder expects " + std::to_string(w.config().feature_dim) + " feature channels, got " +
              std::to_string(feature.size()));
  require(std::isfinite(y), ErrorCode::argument, "decode height must be finite");
  DecodedSample s;
  s.color_feature.resize(static_cast<std::size_t>(w.config().color_dim));
  const float yf = static_cast<float>(y);
  decode_batch(w, 1, feature.data(), &yf, s.color_feature.data(), &s.density);
  return s;
}

ReferenceSample decode_point_reference(std::span<const float> feature, double y, const DecoderWeights& w) {
  const auto& cfg = w.config();
  require(static_cast<int>(feature.size()) == cfg.feature_dim, ErrorCode::configuration,
          "decoder expects " + std::to_string(cfg.feature_dim) + " feature channels, got " +
              std::to_string(feature.size()));
  const double gain = std::numbers::sqrt2;
  // Value and tangent with respect to y.
  std::vector<double> h{y}, dh{1.0};

  auto apply = [&](const DecoderWeights::Layer& layer, bool activate, std::vector<double>& out,
                   std::vector<double>& dout) {
    out.assign(static_cast<std::size_t>(layer.out), 0.0);
    dout.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) out[o] = layer.bias[o];
    for (int i = 0; i < layer.in; ++i) {
      double s = 1.0;
      if (!layer.affine.empty())
        for (int c = 0; c < cfg.feature_dim; ++c) s += static_cast<double>(feature[c]) * layer.affine[c * layer.in + i];
      const double x = h[i] * s;
      const double dx = dh[i] * s;
      for (int o = 0; o < layer.out; ++o) {
        out[o] += x * layer.weight[static_cast<std::size_t>(i) * layer.out + o];
        dout[o] += dx * layer.weight[static_cast<std::size_t>(i) * layer.out + o];
      }
    }
    if (activate)
      for (int o = 0; o < layer.out; ++o) {
        const double scale = out[o] >= 0.0 ? gain : 0.2 * gain;
        out[o] *= scale;
        dout[o] *= scale;
      }
  };

  std::vector<double> out, dout;
  for (const auto& layer : w.layers()) {
    apply(layer, true, out, dout);
    h.swap(out);
    dh.swap(dout);
  }
  ReferenceSample r;
  apply(w.density_head(), false, out, dout);
  const double t = std::tanh(out[0]);
  const double pre = cfg.sharpness * (cfg.surface_amplitude * t - y);
  const double dpre = cfg.sharpness * (cfg.surface_amplitude * (1.0 - t * t) * dout[0] - 1.0);
  r.density = cfg.density_scale * std::max(pre, 0.0);
  r.density_dy = pre > 0.0 ? cfg.density_scale * dpre : 0.0;
  apply(w.color_head(), false, out, dout);
  r.color_feature = out;
  return r;
}

}  // namespace terra
