// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/decoder/heightfield_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"

namespace terra {
namespace {

constexpr std::int64_t kTextureTag = 7100;
constexpr std::int64_t kHillTag = 7200;

double wave_sum(const HeightfieldOracle::Wave* waves, std::size_t n, double x, double z) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += waves[i].amplitude * std::sin(waves[i].freq_x * x + waves[i].freq_z * z + waves[i].phase);
  return s;
}

// Direction uniform on the circle, frequency in [lo, hi] rad per world unit.
HeightfieldOracle::Wave draw_wave(const CounterRng& rng, std::uint64_t ctr, double amplitude, double lo, double hi) {
  const double angle = 2.0 * std::numbers::pi * rng.uniform(4 * ctr);
  const double freq = lo + (hi - lo) * rng.uniform(4 * ctr + 1);
  return {amplitude, freq * std::cos(angle), freq * std::sin(angle), 2.0 * std::numbers::pi * rng.uniform(4 * ctr + 2)};
}

}  // namespace

HeightfieldOracle HeightfieldOracle::flat(double base, std::uint64_t texture_seed, double texture_amplitude,
                                          int color_channels) {
  require(color_channels >= 3, ErrorCode::configuration, "oracle color features need at least 3 channels");
  require(texture_amplitude >= 0.0 && texture_amplitude <= 0.3, ErrorCode::configuration,
          "oracle texture amplitude must lie in [0, 0.3]");
  HeightfieldOracle o;
  o.base_ = base;
  o.channels_ = color_channels;
  o.texture_amplitude_ = texture_amplitude;
  const CounterRng rng(CounterRng::derive(texture_seed, {kTextureTag}));
  for (std::uint64_t i = 0; i < 6; ++i) o.texture_.push_back(draw_wave(rng, i, 0.5, 1.5, 4.0));
  return o;
}

HeightfieldOracle HeightfieldOracle::hills(std::uint64_t seed, int waves, double max_amplitude, int color_channels) {
  require(waves >= 1, ErrorCode::configuration, "hills need at least one wave");
  HeightfieldOracle o = flat(0.0, seed, 0.3, color_channels);
  const CounterRng rng(CounterRng::derive(seed, {kHillTag}));
  for (int i = 0; i < waves; ++i)
    o.waves_.push_back(draw_wave(rng, static_cast<std::uint64_t>(i), max_amplitude / waves, 0.3, 1.2));
  return o;
}

double HeightfieldOracle::height(double x, double z) const {
  return base_ + wave_sum(waves_.data(), waves_.size(), x, z);
}

double HeightfieldOracle::empty_above() const {
  double top = base_;
  for (const Wave& w : waves_) top += std::abs(w.amplitude);
  return top;
}

std::array<double, 3> HeightfieldOracle::texture(double x, double z) const {
  std::array<double, 3> rgb{};
  for (int c = 0; c < 3; ++c) rgb[c] = 0.5 + texture_amplitude_ * wave_sum(texture_.data() + 2 * c, 2, x, z);
  return rgb;
}

void HeightfieldOracle::color_feature(double x, double z, float* out) const {
  std::fill_n(out, channels_, 0.0f);
  const auto rgb = texture(x, z);
  for (int c = 0; c < 3; ++c) out[c] = static_cast<float>(rgb[c]);
}

void HeightfieldOracle::decode(std::size_t count, const double* xyz, float* color, float* sigma,
                               std::uint8_t* covered) const {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = xyz + 3 * i;
    covered[i] = 1;
    sigma[i] = p[1] < height(p[0], p[2]) ? static_cast<float>(solid_density_) : 0.0f;
    color_feature(p[0], p[2], color + i * channels_);
  }
}

DecodedSample HeightfieldOracle::decode_point(double x, double y, double z) const {
  DecodedSample s;
  s.color_feature.resize(static_cast<std::size_t>(channels_));
  const double p[3] = {x, y, z};
  std::uint8_t covered = 0;
  decode(1, p, s.color_feature.data(), &s.density, &covered);
  return s;
}

}  // namespace terra
