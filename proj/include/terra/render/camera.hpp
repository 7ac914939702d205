// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Geometry>
#include <vector>

namespace terra {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Pinhole camera. Camera space looks down -z with +y up and +x right;
/// `orientation` rotates camera space into world space (y up, ground = xz).
struct Camera {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  double fov_y_deg = 60.0;
  int width = 32;
  int height = 32;

  /// Yaw about +y (0 looks toward -z, positive turns toward -x), then pitch
  /// about the camera's right axis (positive looks up).
  static Camera look(const Vec3& position, double yaw, double pitch, double fov_y_deg = 60.0, int width = 32,
                     int height = 32);

  void validate() const;

  Vec3 forward() const { return orientation * Vec3(0, 0, -1); }
  Vec3 up() const { return orientation * Vec3(0, 1, 0); }
  Vec3 right() const { return orientation * Vec3(1, 0, 0); }

  double tan_half_fov() const;
  /// Focal length in pixels along y.
  double focal_pixels() const;

  /// Unit world-space direction through continuous pixel coordinate (px, py);
  /// pixel (i, j) has its center at (i + 0.5, j + 0.5), py grows downward.
  Vec3 ray_direction(double px, double py) const;

  /// Projects a world point to continuous pixel coordinates. Returns false
  /// when the point is not in front of the camera. `range` receives the
  /// Euclidean distance from the camera.
  bool project(const Vec3& world, double& px, double& py, double& range) const;

  Camera with_resolution(int w, int h) const {
    Camera c = *this;
    c.width = w;
    c.height = h;
    return c;
  }

  bool operator==(const Camera& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs() && fov_y_deg == o.fov_y_deg &&
           width == o.width && height == o.height;
  }
};

/// One unit direction per pixel, row-major.
std::vector<Vec3> generate_rays(const Camera& camera);

/// Linearly spaced sample distances on [near, far] and the uniform spacing.
struct RaySamples {
  std::vector<double> t;
  double delta = 0.0;
};
RaySamples sample_ray(double near, double far, int count);

}  // namespace terra
