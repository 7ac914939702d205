// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/refine/refiner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {
namespace {

constexpr int kHeadChannels = 5;  // rgb, disparity, mask
constexpr std::int64_t kRefinerTag = 6100;
const int kStageWidths[] = {64, 32, 16, 16};

enum Tag : std::int64_t { kWeight = 0, kBias = 1, kNoise = 2, kHead = 3, kHeadBias = 4 };

std::vector<float> gaussian(std::uint64_t seed, std::int64_t stage, std::int64_t tensor, std::size_t n,
                            double scale) {
  std::vector<float> v(n);
  CounterRng(CounterRng::derive(seed, {kRefinerTag, stage, tensor})).fill_gaussian(v, scale);
  return v;
}

void check_lr(const RenderBuffers& lr) {
  const int w = lr.mask.width;
  const int h = lr.mask.height;
  require(w >= 1 && h >= 1 && lr.mask.channels == 1, ErrorCode::configuration, "refiner input has no mask");
  require(lr.rgb.width == w && lr.rgb.height == h && lr.rgb.channels == 3 && lr.disparity.width == w &&
              lr.disparity.height == h && lr.disparity.channels == 1,
          ErrorCode::configuration, "refiner input buffers differ in shape");
}

// 3x3 zero-padded convolution via im2col + GEMM, rows in parallel.
FloatImage conv3x3(const FloatImage& in, const std::vector<float>& weight, const std::vector<float>& bias, int out_c) {
  FloatImage out(in.width, in.height, out_c);
  const int k = 9 * in.channels;
  const auto& kern = simd::kernels();
  parallel_for(static_cast<std::size_t>(in.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::vector<float> cols(static_cast<std::size_t>(in.width) * k, 0.0f);
    for (int x = 0; x < in.width; ++x) {
      float* dst = cols.data() + static_cast<std::size_t>(x) * k;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx, dst += in.channels) {
          const int sx = x + dx;
          const int sy = y + dy;
          if (sx < 0 || sy < 0 || sx >= in.width || sy >= in.height) continue;
          std::copy_n(in.pixel(sx, sy).data(), in.channels, dst);
        }
    }
    float* o = out.data.data() + out.index(0, y);
    for (int x = 0; x < in.width; ++x) std::copy(bias.begin(), bias.end(), o + static_cast<std::size_t>(x) * out_c);
    kern.gemm(in.width, out_c, k, cols.data(), k, weight.data(), out_c, o, out_c, true);
  });
  return out;
}

FloatImage head(const FloatImage& x, const ConvRefiner::Stage& s) {
  FloatImage out(x.width, x.height, kHeadChannels);
  for (std::size_t p = 0; p < out.data.size(); p += kHeadChannels)
    std::copy(s.head_bias.begin(), s.head_bias.end(), out.data.begin() + static_cast<std::ptrdiff_t>(p));
  simd::kernels().gemm(static_cast<int>(x.pixel_count()), kHeadChannels, x.channels, x.data.data(), x.channels,
                       s.head.data(), kHeadChannels, out.data.data(), kHeadChannels, true);
  return out;
}

}  // namespace

IdentityRefiner::IdentityRefiner(int factor) : factor_(factor) {
  require(factor >= 1, ErrorCode::configuration, "refiner factor must be at least 1");
}

RefinedBuffers IdentityRefiner::refine(const RenderBuffers& lr) const {
  check_lr(lr);
  const int w = lr.mask.width * factor_;
  const int h = lr.mask.height * factor_;
  return {resize_bilinear(lr.rgb, w, h), resize_bilinear(lr.disparity, w, h), resize_bilinear(lr.mask, w, h)};
}

ConvRefiner ConvRefiner::seeded(int feature_channels, std::uint64_t seed, int factor) {
  require(feature_channels >= 1, ErrorCode::configuration, "refiner needs feature channels");
  require(factor == 8, ErrorCode::configuration, "the seeded conv refiner upsamples by 8");
  ConvRefiner r;
  r.feature_channels_ = feature_channels;
  int in = feature_channels + 5;
  std::int64_t index = 0;
  for (int width : kStageWidths) {
    Stage s;
    s.in = in;
    s.out = width;
    s.weight = gaussian(seed, index, kWeight, static_cast<std::size_t>(9) * in * width, 1.0 / std::sqrt(9.0 * in));
    s.bias = gaussian(seed, index, kBias, static_cast<std::size_t>(width), 0.05);
    s.noise_scale = gaussian(seed, index, kNoise, static_cast<std::size_t>(width), 0.1);
    s.head = gaussian(seed, index, kHead, static_cast<std::size_t>(width) * kHeadChannels,
                      0.02 / std::sqrt(static_cast<double>(width)));
    s.head_bias.assign(kHeadChannels, 0.0f);
    r.stages_.push_back(std::move(s));
    in = width;
    ++index;
  }
  return r;
}

WeightContainer ConvRefiner::to_container() const {
  WeightContainer c;
  c.kind = "refiner";
  c.add("config.feature_channels", {1}, {static_cast<float>(feature_channels_)});
  c.add("config.stages", {1}, {static_cast<float>(stages_.size())});
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    const Stage& s = stages_[i];
    const std::string p = "stage" + std::to_string(i);
    const auto in = static_cast<std::uint32_t>(s.in);
    const auto out = static_cast<std::uint32_t>(s.out);
    c.add(p + ".weight", {9 * in, out}, s.weight);
    c.add(p + ".bias", {out}, s.bias);
    c.add(p + ".noise_scale", {out}, s.noise_scale);
    c.add(p + ".head", {out, kHeadChannels}, s.head);
    c.add(p + ".head_bias", {kHeadChannels}, s.head_bias);
  }
  return c;
}

ConvRefiner ConvRefiner::from_container(const WeightContainer& c) {
  require(c.kind == "refiner", ErrorCode::configuration, "expected refiner weights, got '" + c.kind + "'");
  ConvRefiner r;
  r.feature_channels_ = static_cast<int>(c.get("config.feature_channels", {1}).data[0]);
  const int stages = static_cast<int>(c.get("config.stages", {1}).data[0]);
  require(r.feature_channels_ >= 1 && stages >= 1 && stages <= 8, ErrorCode::configuration,
          "refiner weights declare an invalid shape");
  int in = r.feature_channels_ + 5;
  for (int i = 0; i < stages; ++i) {
    const std::string p = "stage" + std::to_string(i);
    Stage s;
    s.in = in;
    const Tensor& w = c.get(p + ".weight");
    require(w.shape.size() == 2 && w.shape[0] == static_cast<std::uint32_t>(9 * in), ErrorCode::configuration,
            "tensor '" + p + ".weight' does not match the stage input");
    s.out = static_cast<int>(w.shape[1]);
    const auto out = static_cast<std::uint32_t>(s.out);
    s.weight = w.data;
    s.bias = c.get(p + ".bias", {out}).data;
    s.noise_scale = c.get(p + ".noise_scale", {out}).data;
    s.head = c.get(p + ".head", {out, kHeadChannels}).data;
    s.head_bias = c.get(p + ".head_bias", {kHeadChannels}).data;
    in = s.out;
    r.stages_.push_back(std::move(s));
  }
  return r;
}

RefinedBuffers ConvRefiner::refine(const RenderBuffers& lr) const {
  check_lr(lr);
  const int w = lr.mask.width;
  const int h = lr.mask.height;
  require(lr.feature.width == w && lr.feature.height == h && lr.feature.channels == feature_channels_,
          ErrorCode::configuration,
          "conv refiner expects a " + std::to_string(feature_channels_) + "-channel feature image matching the mask");
  require(lr.noise.width == w && lr.noise.height == h, ErrorCode::configuration, "noise image does not match");

  const int fc = feature_channels_;
  FloatImage x(w, h, fc + 5);
  FloatImage skip(w, h, kHeadChannels);
  for (std::size_t p = 0; p < lr.mask.pixel_count(); ++p) {
    float* dst = x.data.data() + p * x.channels;
    std::copy_n(lr.feature.data.data() + p * fc, fc, dst);
    for (int c = 0; c < 3; ++c) dst[fc + c] = skip.data[p * kHeadChannels + c] = lr.rgb.data[p * 3 + c];
    dst[fc + 3] = skip.data[p * kHeadChannels + 3] = lr.disparity.data[p];
    dst[fc + 4] = skip.data[p * kHeadChannels + 4] = lr.mask.data[p];
  }

  const auto& kern = simd::kernels();
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    const Stage& s = stages_[i];
    if (i > 0) {
      x = resize_bilinear(x, x.width * 2, x.height * 2);
      skip = resize_bilinear(skip, skip.width * 2, skip.height * 2);
    }
    x = conv3x3(x, s.weight, s.bias, s.out);
    inject_noise(x, lr.noise, s.noise_scale);
    kern.leaky_relu(static_cast<int>(x.data.size()), 0.2f, std::numbers::sqrt2_v<float>, x.data.data());
    const FloatImage res = head(x, s);
    for (std::size_t k = 0; k < skip.data.size(); ++k) skip.data[k] += res.data[k];
  }

  RefinedBuffers out{FloatImage(skip.width, skip.height, 3), FloatImage(skip.width, skip.height, 1),
                     FloatImage(skip.width, skip.height, 1)};
  for (std::size_t p = 0; p < skip.pixel_count(); ++p) {
    const float* s = skip.data.data() + p * kHeadChannels;
    for (int c = 0; c < 3; ++c) out.rgb.data[p * 3 + c] = s[c];
    out.disparity.data[p] = std::max(0.0f, s[3]);
    out.mask.data[p] = std::clamp(s[4], 0.0f, 1.0f);
  }
  return out;
}

void inject_noise(FloatImage& activations, const FloatImage& noise, std::span<const float> scales) {
  require(noise.channels == 1, ErrorCode::configuration, "noise image must have one channel");
  require(static_cast<int>(scales.size()) == activations.channels, ErrorCode::configuration,
          "one noise scale per activation channel is required");
  const FloatImage n = (noise.width == activations.width && noise.height == activations.height)
                           ? noise
                           : resize_bilinear(noise, activations.width, activations.height);
  for (std::size_t p = 0; p < activations.pixel_count(); ++p) {
    const float v = n.data[p];
    float* a = activations.data.data() + p * activations.channels;
    for (int c = 0; c < activations.channels; ++c) a[c] += scales[c] * v;
  }
}

RefinementLosses refinement_losses(const RenderBuffers& lr, const RefinedBuffers& hr) {
  check_lr(lr);
  const int w = hr.mask.width;
  const int h = hr.mask.height;
  require(hr.disparity.width == w && hr.disparity.height == h && hr.rgb.width == w && hr.rgb.height == h,
          ErrorCode::configuration, "refined buffers differ in shape");
  const FloatImage up_d = resize_bilinear(lr.disparity, w, h);
  const FloatImage up_m = resize_bilinear(lr.mask, w, h);
  double dd = 0.0, dm = 0.0, sky = 0.0;
  const std::size_t n = hr.mask.pixel_count();
  for (std::size_t p = 0; p < n; ++p) {
    dd += std::abs(static_cast<double>(hr.disparity.data[p]) - up_d.data[p]);
    dm += std::abs(static_cast<double>(hr.mask.data[p]) - up_m.data[p]);
    double mag = 0.0;
    for (int c = 0; c < 3; ++c) mag += std::abs(static_cast<double>(hr.rgb.data[p * 3 + c]));
    sky += std::exp(-20.0 * mag) * hr.mask.data[p];
  }
  return {(dd + dm) / static_cast<double>(n), sky / static_cast<double>(n)};
}

}  // namespace terra
