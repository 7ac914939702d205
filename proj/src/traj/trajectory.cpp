// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/traj/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "terra/common/bytes.hpp"
#include "terra/common/error.hpp"

namespace terra {
namespace {

Trajectory circle(const Camera& start, const Vec3& center, double radius, int frames, TrajectoryKind kind,
                  bool tangent, double pitch) {
  start.validate();
  require(frames >= 2, ErrorCode::argument, "a closed trajectory needs at least 2 frames");
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::argument, "trajectory radius must be positive");
  Trajectory t;
  t.kind = kind;
  t.step_len = 2.0 * radius * std::sin(std::numbers::pi / frames);
  for (int k = 0; k < frames; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / frames;
    const Vec3 pos(center.x() + radius * std::cos(theta), center.y(), center.z() + radius * std::sin(theta));
    Camera cam = start;
    if (kind == TrajectoryKind::orbit) {
      cam = Camera::look(pos, std::numbers::pi / 2 - theta, pitch, start.fov_y_deg, start.width, start.height);
    } else if (tangent) {
      cam = Camera::look(pos, std::numbers::pi - theta, pitch, start.fov_y_deg, start.width, start.height);
    }
    cam.position = pos;
    t.poses.push_back(cam);
  }
  t.poses.push_back(t.poses.front());
  return t;
}

}  // namespace

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::forward: return "forward";
    case TrajectoryKind::cyclic: return "cyclic";
    case TrajectoryKind::orbit: return "orbit";
    case TrajectoryKind::free: return "free";
  }
  return "free";
}

Vec3 ground_forward(const Camera& camera) {
  Vec3 f = camera.forward();
  f.y() = 0.0;
  const double n = f.norm();
  require(n > 1e-9, ErrorCode::argument, "camera looks straight up or down; its ground direction is undefined");
  return f / n;
}

Vec3 ground_right(const Camera& camera) {
  const Vec3 f = ground_forward(camera);
  return {-f.z(), 0.0, f.x()};
}

Camera forward_pose(const Camera& start, long index, double step_len) {
  Camera c = start;
  c.position = start.position + (static_cast<double>(index) * step_len) * ground_forward(start);
  return c;
}

Camera lateral_pose(const Camera& start, long index, double step_len) {
  Camera c = start;
  c.position = start.position + (static_cast<double>(index) * step_len) * ground_right(start);
  return c;
}

Trajectory forward_trajectory(const Camera& start, int steps, double step_len) {
  start.validate();
  require(steps >= 0, ErrorCode::argument, "step count must be non-negative");
  require(step_len > 0.0 && std::isfinite(step_len), ErrorCode::argument, "step length must be positive");
  Trajectory t;
  t.kind = TrajectoryKind::forward;
  t.step_len = step_len;
  for (int k = 0; k <= steps; ++k) t.poses.push_back(forward_pose(start, k, step_len));
  return t;
}

Trajectory cyclic_trajectory(const Camera& start, const Vec3& center, double radius, int frames, bool tangent,
                             double pitch) {
  return circle(start, center, radius, frames, TrajectoryKind::cyclic, tangent, pitch);
}

Trajectory orbit_trajectory(const Camera& start, const Vec3& center, double radius, int frames, double pitch) {
  return circle(start, center, radius, frames, TrajectoryKind::orbit, true, pitch);
}

std::string format_trajectory(const Trajectory& t) {
  std::string out = "# kind " + std::string(to_string(t.kind)) + "\n# x y z qw qx qy qz fov width height\n";
  char line[512];
  for (const Camera& c : t.poses) {
    std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %d\n", c.position.x(),
                  c.position.y(), c.position.z(), c.orientation.w(), c.orientation.x(), c.orientation.y(),
                  c.orientation.z(), c.fov_y_deg, c.width, c.height);
    out += line;
  }
  return out;
}

Trajectory parse_trajectory(const std::string& text) {
  Trajectory t;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.rfind("# kind ", 0) == 0) {
      const std::string kind = line.substr(7);
      for (auto k : {TrajectoryKind::forward, TrajectoryKind::cyclic, TrajectoryKind::orbit, TrajectoryKind::free})
        if (kind == to_string(k)) t.kind = k;
      continue;
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    double v[8];
    int w = 0, h = 0;
    for (double& x : v) fields >> x;
    fields >> w >> h;
    std::string extra;
    require(!fields.fail() && !(fields >> extra), ErrorCode::argument,
            "trajectory line " + std::to_string(number) + ": expected x y z qw qx qy qz fov width height");
    Camera c;
    c.position = Vec3(v[0], v[1], v[2]);
    c.orientation = Quat(v[3], v[4], v[5], v[6]);
    c.fov_y_deg = v[7];
    c.width = w;
    c.height = h;
    try {
      c.validate();
    } catch (const Error& e) {
      fail(ErrorCode::argument, "trajectory line " + std::to_string(number) + ": " + e.what());
    }
    t.poses.push_back(c);
  }
  if (t.poses.size() >= 2) t.step_len = (t.poses[1].position - t.poses[0].position).norm();
  return t;
}

void save_trajectory(const std::string& path, const Trajectory& t) {
  const std::string s = format_trajectory(t);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Trajectory load_trajectory(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return parse_trajectory(std::string(bytes.begin(), bytes.end()));
}

}  // namespace terra
