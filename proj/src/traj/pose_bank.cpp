// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/traj/pose_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"

namespace terra {
namespace {

constexpr std::int64_t kBankTag = 9100;
constexpr std::int64_t kSampleTag = 9200;

}  // namespace

GroundExtent GroundExtent::of(const LayoutGrid& grid) {
  return {grid.origin_x(), grid.origin_z(), grid.origin_x() + grid.extent_x(), grid.origin_z() + grid.extent_z()};
}

std::array<Vec3, 8> near_half_frustum(const Camera& camera, double near, double far) {
  const double mid = 0.5 * (near + far);
  const double ty = camera.tan_half_fov();
  const double tx = ty * camera.width / camera.height;
  std::array<Vec3, 8> out;
  int k = 0;
  for (double d : {near, mid})
    for (double sy : {-1.0, 1.0})
      for (double sx : {-1.0, 1.0}) out[k++] = camera.position + camera.orientation * Vec3(sx * tx * d, sy * ty * d, -d);
  return out;
}

bool near_half_inside(const Camera& camera, double near, double far, const GroundExtent& extent) {
  for (const Vec3& p : near_half_frustum(camera, near, far))
    if (!extent.contains(p.x(), p.z())) return false;
  return extent.contains(camera.position.x(), camera.position.z());
}

PoseBank build_pose_bank(const GroundExtent& extent, const PoseBankConfig& config) {
  require(config.count >= 1 && config.yaw_tries >= 1 && config.max_tries >= 1, ErrorCode::argument,
          "pose bank counts must be positive");
  require(extent.max_x > extent.min_x && extent.max_z > extent.min_z, ErrorCode::argument, "pose bank extent is empty");
  require(config.height_offset >= 0.0, ErrorCode::argument, "height offset range must be non-negative");
  PoseBank bank;
  bank.config = config;
  bank.extent = extent;
  bank.poses.reserve(static_cast<std::size_t>(config.count));
  for (int i = 0; i < config.count; ++i) {
    const CounterRng rng(CounterRng::derive(config.seed, {kBankTag, i}));
    std::uint64_t ctr = 0;
    bool placed = false;
    for (int attempt = 0; attempt < config.max_tries && !placed; ++attempt) {
      const Vec3 pos(extent.min_x + (extent.max_x - extent.min_x) * rng.uniform(ctr),
                     config.base_height + config.height_offset * rng.uniform(ctr + 1),
                     extent.min_z + (extent.max_z - extent.min_z) * rng.uniform(ctr + 2));
      ctr += 3;
      for (int y = 0; y < config.yaw_tries; ++y) {
        const double yaw = 2.0 * std::numbers::pi * rng.uniform(ctr++);
        const Camera cam = Camera::look(pos, yaw, 0.0, config.fov_y_deg, config.width, config.height);
        if (near_half_inside(cam, config.near, config.far, extent)) {
          bank.poses.push_back(cam);
          placed = true;
          break;
        }
      }
    }
    require(placed, ErrorCode::argument,
            "pose " + std::to_string(i) + ": no position/yaw satisfied the near-half frustum rule after " +
                std::to_string(config.max_tries) + " tries; the extent is too small");
  }
  return bank;
}

PoseBank build_pose_bank(const LayoutGrid& grid, const PoseBankConfig& config) {
  return build_pose_bank(GroundExtent::of(grid), config);
}

InverseDensitySampler::InverseDensitySampler(const PoseBank& bank, const RadianceField& field)
    : InverseDensitySampler([&] {
        std::vector<double> d;
        d.reserve(bank.poses.size());
        for (const Camera& c : bank.poses) d.push_back(density_at(field, c.position.x(), c.position.y(), c.position.z()));
        return d;
      }()) {}

InverseDensitySampler::InverseDensitySampler(std::vector<double> densities) {
  require(!densities.empty(), ErrorCode::argument, "cannot sample from an empty pose bank");
  double total = 0.0;
  for (double d : densities) {
    require(std::isfinite(d) && d >= 0.0, ErrorCode::numeric, "pose densities must be finite and non-negative");
    weights_.push_back(1.0 / (kEpsilon + d));
    total += weights_.back();
    cdf_.push_back(total);
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t InverseDensitySampler::sample(std::uint64_t seed, std::uint64_t draw) const {
  const double u = CounterRng(CounterRng::derive(seed, {kSampleTag})).uniform(draw);
  const auto i = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  return std::min(i, cdf_.size() - 1);
}

}  // namespace terra
