// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/sky/skydome.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"

namespace terra {
namespace {

constexpr std::int64_t kCloudTag = 8100;
constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

SkyDome::SkyDome(FloatImage panorama, double min_elevation_deg, double max_elevation_deg)
    : panorama_(std::move(panorama)), min_elev_(min_elevation_deg), max_elev_(max_elevation_deg) {
  require(panorama_.width >= 2 && panorama_.height >= 2 && panorama_.channels == 3, ErrorCode::configuration,
          "sky panorama must be an RGB image of at least 2x2");
  require(min_elev_ >= -90.0 && max_elev_ <= 90.0 && min_elev_ < max_elev_, ErrorCode::configuration,
          "sky elevation range must satisfy -90 <= min < max <= 90");
  for (float v : panorama_.data) require(std::isfinite(v), ErrorCode::numeric, "sky panorama has non-finite pixels");
  const int last = panorama_.height - 1;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int x = 0; x < panorama_.width; ++x) sum += panorama_.at(x, last, c);
    fill_[c] = static_cast<float>(sum / panorama_.width);
  }
}

SkyDome SkyDome::procedural(std::uint64_t seed, int width, int height, const SkyStyle& style,
                            double min_elevation_deg, double max_elevation_deg) {
  require(width >= 2 && height >= 2, ErrorCode::configuration, "procedural sky needs at least 2x2 pixels");
  const CounterRng rng(CounterRng::derive(seed, {kCloudTag}));
  struct Wave {
    int az_freq;
    double el_freq, phase, amp;
  };
  std::vector<Wave> waves;
  for (std::uint64_t k = 0; k < 6; ++k)
    waves.push_back({1 + static_cast<int>(rng.bits(4 * k) % 6), 2.0 + 6.0 * rng.uniform(4 * k + 1),
                     2.0 * std::numbers::pi * rng.uniform(4 * k + 2), 0.5 + 0.5 * rng.uniform(4 * k + 3)});
  FloatImage pano(width, height, 3);
  for (int r = 0; r < height; ++r) {
    const double elev = (max_elevation_deg - r * (max_elevation_deg - min_elevation_deg) / (height - 1)) * kDeg;
    const double s = std::sin(std::max(elev, 0.0));
    for (int c = 0; c < width; ++c) {
      const double az = 2.0 * std::numbers::pi * c / width;
      double f = 0.0, norm = 0.0;
      for (const auto& w : waves) {
        f += w.amp * std::sin(w.az_freq * az + w.el_freq * elev + w.phase);
        norm += w.amp;
      }
      const double t = std::clamp(0.5 + 0.5 * f / norm, 0.0, 1.0);
      const double cloud = style.cloud_amount * t * t * (3.0 - 2.0 * t) * std::cos(elev);
      for (int ch = 0; ch < 3; ++ch) {
        const double sky = style.horizon[ch] + (style.zenith[ch] - style.horizon[ch]) * s;
        pano.at(c, r, ch) = static_cast<float>(sky + (1.0 - sky) * cloud);
      }
    }
  }
  return SkyDome(std::move(pano), min_elevation_deg, max_elevation_deg);
}

SkyDome SkyDome::load(const std::string& path, double min_elevation_deg, double max_elevation_deg) {
  FloatImage img = from_bytes(read_image(path));
  require(img.channels == 3, ErrorCode::configuration, "sky panorama must be RGB: " + path);
  return SkyDome(std::move(img), min_elevation_deg, max_elevation_deg);
}

std::array<float, 3> SkyDome::sample(const Vec3& direction) const {
  const double len = direction.norm();
  require(std::isfinite(len) && len > 0.0, ErrorCode::argument, "sky direction must be nonzero and finite");
  const Vec3 d = direction / len;
  const double elev = std::asin(std::clamp(d.y(), -1.0, 1.0)) / kDeg;
  if (elev < min_elev_) return fill_;
  const int w = panorama_.width;
  const int h = panorama_.height;
  double az = std::atan2(d.x(), -d.z()) / (2.0 * std::numbers::pi);
  if (az < 0.0) az += 1.0;
  const double u = az * w;
  const double v = std::clamp((max_elev_ - elev) / (max_elev_ - min_elev_), 0.0, 1.0) * (h - 1);
  const double u0 = std::floor(u);
  const double v0 = std::floor(v);
  const double tu = u - u0;
  const double tv = v - v0;
  const int c0 = static_cast<int>(u0) % w;
  const int c1 = (c0 + 1) % w;
  const int r0 = std::min(static_cast<int>(v0), h - 1);
  const int r1 = std::min(r0 + 1, h - 1);
  std::array<float, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double top = (1.0 - tu) * panorama_.at(c0, r0, c) + tu * panorama_.at(c1, r0, c);
    const double bot = (1.0 - tu) * panorama_.at(c0, r1, c) + tu * panorama_.at(c1, r1, c);
    out[c] = static_cast<float>((1.0 - tv) * top + tv * bot);
  }
  return out;
}

FloatImage render_dome_view(const SkyDome& dome, const Camera& camera) {
  const std::vector<Vec3> dirs = generate_rays(camera);
  FloatImage out(camera.width, camera.height, 3);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto rgb = dome.sample(dirs[i]);
    std::copy(rgb.begin(), rgb.end(), out.data.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

FloatImage composite_sky(const FloatImage& rgb, const FloatImage& mask, const FloatImage& dome) {
  require(rgb.channels == 3 && dome.channels == 3 && mask.channels == 1 && rgb.width == mask.width &&
              rgb.height == mask.height && dome.width == rgb.width && dome.height == rgb.height,
          ErrorCode::configuration, "sky composite inputs differ in shape");
  FloatImage out(rgb.width, rgb.height, 3);
  for (std::size_t p = 0; p < mask.pixel_count(); ++p) {
    const float m = mask.data[p];
    for (int c = 0; c < 3; ++c) out.data[3 * p + c] = rgb.data[3 * p + c] * m + dome.data[3 * p + c] * (1.0f - m);
  }
  return out;
}

}  // namespace terra
