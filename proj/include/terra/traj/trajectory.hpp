// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "terra/render/camera.hpp"

namespace terra {

enum class TrajectoryKind { forward, cyclic, orbit, free };

std::string_view to_string(TrajectoryKind kind);

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::free;
  double step_len = 0.0;
  std::vector<Camera> poses;
};

/// Grid width 38.4 / 2 over 100 steps.
constexpr double kDefaultStepLength = 0.192;
constexpr int kDefaultSteps = 100;

/// Unit ground-plane projection of the camera's forward axis.
Vec3 ground_forward(const Camera& camera);
/// Unit ground-plane right axis (forward x up).
Vec3 ground_right(const Camera& camera);

/// Pose `index` steps of `step_len` along the ground-projected forward axis.
/// Positions are computed from the integer index, so returning to an index
/// returns to the identical pose.
Camera forward_pose(const Camera& start, long index, double step_len);
/// Same along the ground-projected right axis.
Camera lateral_pose(const Camera& start, long index, double step_len);

/// steps + 1 poses: start and each forward step, orientation fixed.
Trajectory forward_trajectory(const Camera& start, int steps = kDefaultSteps, double step_len = kDefaultStepLength);

/// `frames` distinct poses on a circle in the plane y = center.y, at angles
/// 2 pi k / frames from +x toward +z, followed by a copy of the first pose to
/// close the loop. Cameras face along the direction of travel with the given
/// pitch, or keep `start`'s orientation when `tangent` is false. `start`
/// supplies fov and resolution.
Trajectory cyclic_trajectory(const Camera& start, const Vec3& center, double radius, int frames, bool tangent = true,
                             double pitch = 0.0);

/// Same circle, every camera facing the center horizontally with the given
/// pitch.
Trajectory orbit_trajectory(const Camera& start, const Vec3& center, double radius, int frames, double pitch = 0.0);

/// One pose per line: x y z qw qx qy qz fov width height. '#' starts a
/// comment. Values are written with round-trip precision.
std::string format_trajectory(const Trajectory& t);
Trajectory parse_trajectory(const std::string& text);
void save_trajectory(const std::string& path, const Trajectory& t);
Trajectory load_trajectory(const std::string& path);

}  // namespace terra
