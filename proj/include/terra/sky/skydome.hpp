// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "terra/common/image.hpp"
#include "terra/render/camera.hpp"

namespace terra {

struct SkyStyle {
  std::array<float, 3> zenith{0.22f, 0.42f, 0.78f};
  std::array<float, 3> horizon{0.78f, 0.85f, 0.92f};
  float cloud_amount = 0.35f;
};

/// Cylindrical sky panorama at infinity. Column c covers azimuth
/// 360 * c / width degrees measured by atan2(x, -z) (column 0 faces -z) and
/// wraps; row 0 sits at max_elevation and row height-1 at min_elevation.
/// Directions below the covered range return the fill color.
class SkyDome {
 public:
  SkyDome(FloatImage panorama, double min_elevation_deg = -15.0, double max_elevation_deg = 90.0);

  /// Vertical gradient from horizon to zenith plus a seeded low-frequency
  /// cloud field that fades out toward the zenith.
  static SkyDome procedural(std::uint64_t seed, int width = 512, int height = 128, const SkyStyle& style = {},
                            double min_elevation_deg = -15.0, double max_elevation_deg = 90.0);
  static SkyDome load(const std::string& path, double min_elevation_deg = -15.0, double max_elevation_deg = 90.0);

  const FloatImage& panorama() const { return panorama_; }
  double min_elevation() const { return min_elev_; }
  double max_elevation() const { return max_elev_; }
  std::array<float, 3> fill() const { return fill_; }

  std::array<float, 3> sample(const Vec3& direction) const;

 private:
  FloatImage panorama_;
  double min_elev_;
  double max_elev_;
  std::array<float, 3> fill_{};
};

FloatImage render_dome_view(const SkyDome& dome, const Camera& camera);

/// I_full = rgb * mask + dome * (1 - mask).
FloatImage composite_sky(const FloatImage& rgb, const FloatImage& mask, const FloatImage& dome);

}  // namespace terra
