// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/decoder/field.hpp"
#include "terra/grid/layout_grid.hpp"
#include "terra/render/camera.hpp"

namespace terra {

/// Axis-aligned ground rectangle [min_x, max_x] x [min_z, max_z].
struct GroundExtent {
  double min_x = 0.0;
  double min_z = 0.0;
  double max_x = 0.0;
  double max_z = 0.0;

  bool contains(double x, double z) const { return x >= min_x && x <= max_x && z >= min_z && z <= max_z; }
  static GroundExtent of(const LayoutGrid& grid);
};

struct PoseBankConfig {
  int count = 1000;
  double base_height = 1.0;
  double height_offset = 0.5;  // offsets drawn from [0, height_offset]
  double near = 1.0;
  double far = 16.0;
  double fov_y_deg = 60.0;
  int width = 32;
  int height = 32;
  int yaw_tries = 64;    // yaw draws per position
  int max_tries = 1000;  // positions per pose before giving up
  std::uint64_t seed = 0;
};

struct PoseBank {
  PoseBankConfig config;
  GroundExtent extent;
  std::vector<Camera> poses;
};

/// Corners of the near half of the frustum: camera depths near and
/// (near + far) / 2.
std::array<Vec3, 8> near_half_frustum(const Camera& camera, double near, double far);

/// Whether the ground projection of the near-half frustum lies inside `extent`.
bool near_half_inside(const Camera& camera, double near, double far, const GroundExtent& extent);

/// Level cameras at uniform positions and heights. Yaw is redrawn until the
/// near-half frustum rule holds; after `yaw_tries` the position is redrawn.
PoseBank build_pose_bank(const GroundExtent& extent, const PoseBankConfig& config);
PoseBank build_pose_bank(const LayoutGrid& grid, const PoseBankConfig& config);

/// Picks bank indices with probability proportional to 1 / (1e-3 + density).
class InverseDensitySampler {
 public:
  static constexpr double kEpsilon = 1e-3;

  InverseDensitySampler(const PoseBank& bank, const RadianceField& field);
  explicit InverseDensitySampler(std::vector<double> densities);

  const std::vector<double>& weights() const { return weights_; }
  /// Draw `draw` of the stream keyed by `seed`.
  std::size_t sample(std::uint64_t seed, std::uint64_t draw) const;

 private:
  std::vector<double> weights_;
  std::vector<double> cdf_;
};

}  // namespace terra
