// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/render/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "terra/common/error.hpp"

namespace terra {

Camera Camera::look(const Vec3& position, double yaw, double pitch, double fov_y_deg, int width, int height) {
  Camera c;
  c.position = position;
  c.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitY())) * Quat(Eigen::AngleAxisd(pitch, Vec3::UnitX()));
  c.fov_y_deg = fov_y_deg;
  c.width = width;
  c.height = height;
  return c;
}

void Camera::validate() const {
  require(position.allFinite(), ErrorCode::argument, "camera position must be finite");
  require(orientation.coeffs().allFinite() && std::abs(orientation.norm() - 1.0) < 1e-6, ErrorCode::argument,
          "camera orientation must be a unit quaternion");
  require(fov_y_deg > 0.0 && fov_y_deg < 180.0, ErrorCode::argument,
          "field of view must lie in (0, 180) degrees, got " + std::to_string(fov_y_deg));
  require(width >= 1 && height >= 1, ErrorCode::argument,
          "camera resolution must be at least 1x1, got " + std::to_string(width) + "x" + std::to_string(height));
}

double Camera::tan_half_fov() const { return std::tan(fov_y_deg * std::numbers::pi / 360.0); }

double Camera::focal_pixels() const { return 0.5 * height / tan_half_fov(); }

Vec3 Camera::ray_direction(double px, double py) const {
  const double f = focal_pixels();
  const Vec3 cam((px - 0.5 * width) / f, (0.5 * height - py) / f, -1.0);
  return (orientation * cam).normalized();
}

bool Camera::project(const Vec3& world, double& px, double& py, double& range) const {
  const Vec3 rel = world - position;
  const Vec3 cam = orientation.conjugate() * rel;
  range = rel.norm();
  if (cam.z() >= 0.0) return false;
  const double f = focal_pixels();
  px = 0.5 * width + f * cam.x() / -cam.z();
  py = 0.5 * height - f * cam.y() / -cam.z();
  return true;
}

std::vector<Vec3> generate_rays(const Camera& camera) {
  camera.validate();
  std::vector<Vec3> dirs(static_cast<std::size_t>(camera.width) * camera.height);
  for (int j = 0; j < camera.height; ++j)
    for (int i = 0; i < camera.width; ++i)
      dirs[static_cast<std::size_t>(j) * camera.width + i] = camera.ray_direction(i + 0.5, j + 0.5);
  return dirs;
}

RaySamples sample_ray(double near, double far, int count) {
  require(std::isfinite(near) && std::isfinite(far) && near > 0.0 && near < far, ErrorCode::argument,
          "sample bounds need 0 < near < far, got near=" + std::to_string(near) + " far=" + std::to_string(far));
  require(count >= 2, ErrorCode::argument, "need at least 2 samples per ray, got " + std::to_string(count));
  RaySamples s;
  s.delta = (far - near) / (count - 1);
  s.t.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) s.t[i] = i == count - 1 ? far : near + i * s.delta;
  return s;
}

}  // namespace terra
