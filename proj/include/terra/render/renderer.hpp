// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/common/image.hpp"
#include "terra/decoder/field.hpp"
#include "terra/render/camera.hpp"

namespace terra {

struct RenderConfig {
  double near = 1.0;
  double far = 16.0;
  int samples = 128;
  /// Strict mode throws on samples outside the field's extent; permissive
  /// mode treats them as empty space. Samples above the field's empty height
  /// are exactly empty and are neither decoded nor checked.
  bool strict = false;
  /// A ray stops decoding once its transmittance falls below this; the
  /// skipped samples can add at most this much weight.
  double termination = 1e-7;

  bool operator==(const RenderConfig&) const = default;
};

/// Standard Gaussian values on the ground-plane cell lattice, hashed by cell
/// position so the grid is unbounded and never changes.
class NoiseGrid {
 public:
  explicit NoiseGrid(std::uint64_t seed, double cell_width = 0.15);

  std::uint64_t seed() const { return seed_; }
  double cell_width() const { return cell_width_; }
  double value(std::int64_t row, std::int64_t col) const;
  /// Bilinear read with cell centers at ((col + 0.5) w, (row + 0.5) w).
  double sample(double x, double z) const;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  double cell_width_;
};

/// Affine color-feature -> RGB map: rgb = matrix * phi + offset.
struct ProjectionP {
  int channels = 0;
  std::vector<float> matrix;  // [3][channels]
  std::array<float, 3> offset{};

  static ProjectionP seeded(int channels, std::uint64_t seed);
  /// Copies channels 0..2 with zero offset.
  static ProjectionP select_rgb(int channels);

  bool operator==(const ProjectionP&) const = default;
};

FloatImage project_rgb(const FloatImage& phi, const ProjectionP& p);

struct RenderBuffers {
  FloatImage feature;       // color_channels
  FloatImage rgb;           // 3
  FloatImage disparity;     // 1
  FloatImage mask;          // 1, accumulated opacity
  FloatImage noise;         // 1
  FloatImage transparency;  // 1, per-ray visible opacity decrease

  int width() const { return mask.width; }
  int height() const { return mask.height; }
  bool operator==(const RenderBuffers&) const = default;
};

/// Per-sample record of one traced ray.
struct RayTrace {
  std::vector<double> t;
  std::vector<double> sigma;
  std::vector<double> weight;
  double disparity = 0.0;
  double mask = 0.0;
};

/// Traces one ray through the field with the renderer's sampling and
/// termination rules; samples after termination have zero weight.
RayTrace trace_ray(const RadianceField& field, const Vec3& origin, const Vec3& direction, const RenderConfig& config);

RenderBuffers render_frame(const RadianceField& field, const Camera& camera, const RenderConfig& config,
                           const ProjectionP& projection, const NoiseGrid& noise);

/// Renders at factor x resolution and box-downsamples every buffer.
RenderBuffers supersample_render(const RadianceField& field, const Camera& camera, const RenderConfig& config,
                                 const ProjectionP& projection, const NoiseGrid& noise, int factor);

/// Axis-aligned ground box holding every sample the camera can take,
/// as {min_x, min_z, max_x, max_z}.
std::array<double, 4> frustum_footprint(const Camera& camera, const RenderConfig& config);

}  // namespace terra
