// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/decoder/field.hpp"

namespace terra {

/// Analytic terrain: h(x, z) = base + sum_k a_k sin(fx_k x + fz_k z + phase_k),
/// density sigma_solid below h and 0 above. The color feature depends on
/// (x, z) only; channels 0..2 hold an RGB texture in [0.2, 0.8], the rest are
/// zero.
class HeightfieldOracle final : public RadianceField {
 public:
  struct Wave {
    double amplitude = 0.0;
    double freq_x = 0.0;
    double freq_z = 0.0;
    double phase = 0.0;
  };

  static constexpr double kSolidDensity = 50.0;

  /// Flat ground at `base` with a seeded texture of the given amplitude
  /// (0 gives a uniform color).
  static HeightfieldOracle flat(double base = 0.0, std::uint64_t texture_seed = 1, double texture_amplitude = 0.3,
                                int color_channels = 128);
  /// Seeded rolling hills with `waves` sinusoids of total amplitude <= max_amplitude.
  static HeightfieldOracle hills(std::uint64_t seed, int waves = 4, double max_amplitude = 0.5,
                                 int color_channels = 128);

  double height(double x, double z) const;
  /// Writes color_channels() values.
  void color_feature(double x, double z, float* out) const;
  double solid_density() const { return solid_density_; }
  /// RGB texture value at (x, z); channels 0..2 of color_feature.
  std::array<double, 3> texture(double x, double z) const;

  int color_channels() const override { return channels_; }
  void decode(std::size_t count, const double* xyz, float* color, float* sigma, std::uint8_t* covered) const override;
  bool covers(double, double) const override { return true; }
  double empty_above() const override;

  DecodedSample decode_point(double x, double y, double z) const;

 private:
  double base_ = 0.0;
  std::vector<Wave> waves_;
  std::vector<Wave> texture_;  // three per RGB channel
  double texture_amplitude_ = 0.0;
  double solid_density_ = kSolidDensity;
  int channels_ = 128;
};

}  // namespace terra
