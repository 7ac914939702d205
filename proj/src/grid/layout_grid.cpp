// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/grid/layout_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "terra/common/error.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {

LayoutGrid::LayoutGrid(int height, int width, int channels, std::vector<float> features, double cell_width,
                       double origin_x, double origin_z, GridProvenance provenance)
    : height_(height),
      width_(width),
      channels_(channels),
      features_(std::move(features)),
      cell_width_(cell_width),
      origin_x_(origin_x),
      origin_z_(origin_z),
      provenance_(provenance) {
  require(height >= 2 && width >= 2, ErrorCode::configuration, "layout grid must be at least 2x2");
  require(channels >= 1, ErrorCode::configuration, "layout grid needs at least one channel");
  require(cell_width > 0.0, ErrorCode::configuration, "cell width must be positive");
  require(features_.size() == static_cast<std::size_t>(height) * width * channels, ErrorCode::configuration,
          "feature buffer size does not match grid shape");
  for (float f : features_) require(std::isfinite(f), ErrorCode::numeric, "layout grid holds a non-finite feature");
}

std::span<const float> LayoutGrid::cell(int row, int col) const {
  return {features_.data() + (static_cast<std::size_t>(row) * width_ + col) * channels_,
          static_cast<std::size_t>(channels_)};
}

GridCoord LayoutGrid::world_to_grid(double x, double z) const {
  return {(x - origin_x_) / cell_width_, (z - origin_z_) / cell_width_};
}

void LayoutGrid::grid_to_world(const GridCoord& g, double& x, double& z) const {
  x = origin_x_ + g.u * cell_width_;
  z = origin_z_ + g.v * cell_width_;
}

bool LayoutGrid::contains(double x, double z) const {
  const GridCoord g = world_to_grid(x, z);
  return g.u >= 0.0 && g.v >= 0.0 && g.u <= width_ && g.v <= height_;
}

BilinearTap bilinear_tap(double fz, double fx, int n_rows, int n_cols) {
  fx = std::clamp(fx, 0.0, static_cast<double>(n_cols - 1));
  fz = std::clamp(fz, 0.0, static_cast<double>(n_rows - 1));
  BilinearTap t{};
  t.col0 = static_cast<int>(std::floor(fx));
  t.row0 = static_cast<int>(std::floor(fz));
  t.col1 = std::min(t.col0 + 1, n_cols - 1);
  t.row1 = std::min(t.row0 + 1, n_rows - 1);
  const double tx = fx - t.col0;
  const double tz = fz - t.row0;
  t.w[0] = static_cast<float>((1.0 - tz) * (1.0 - tx));
  t.w[1] = static_cast<float>((1.0 - tz) * tx);
  t.w[2] = static_cast<float>(tz * (1.0 - tx));
  t.w[3] = static_cast<float>(tz * tx);
  return t;
}

bool LayoutGrid::interpolate(double x, double z, float* out) const {
  if (!contains(x, z)) return false;
  const GridCoord g = world_to_grid(x, z);
  const BilinearTap t = bilinear_tap(g.v - 0.5, g.u - 0.5, height_, width_);
  simd::kernels().lerp4(channels_, t.w, cell(t.row0, t.col0).data(), cell(t.row0, t.col1).data(),
                        cell(t.row1, t.col0).data(), cell(t.row1, t.col1).data(), out);
  return true;
}

std::vector<float> LayoutGrid::interpolate_feature(double x, double z) const {
  std::vector<float> out(static_cast<std::size_t>(channels_));
  if (!interpolate(x, z, out.data())) {
    std::ostringstream msg;
    msg << "query (" << x << ", " << z << ") outside layout extent [" << origin_x_ << ", "
        << origin_x_ + extent_x() << "] x [" << origin_z_ << ", " << origin_z_ + extent_z() << "]";
    fail(ErrorCode::out_of_bounds, msg.str());
  }
  return out;
}

}  // namespace terra
