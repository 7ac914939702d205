// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace terra {

/// World units per layout cell.
inline constexpr double kDefaultCellWidth = 0.15;

/// Anything that can produce a layout feature at a continuous ground
/// position (x, z). Returns false when (x, z) lies outside the region the
/// field can answer for.
class FeatureField {
 public:
  virtual ~FeatureField() = default;
  virtual int channels() const = 0;
  virtual bool interpolate(double x, double z, float* out) const = 0;
};

struct GridCoord {
  double u = 0.0;  // along x (columns)
  double v = 0.0;  // along z (rows)
};

enum class GridProvenance { single_latent, extended };

/// 2D scene-layout feature grid. Cell (i, j) is row i (z) and column j (x);
/// its center sits at origin + ((j + 0.5) * cell_width, (i + 0.5) * cell_width).
class LayoutGrid final : public FeatureField {
 public:
  LayoutGrid() = default;
  LayoutGrid(int height, int width, int channels, std::vector<float> features, double cell_width = kDefaultCellWidth,
             double origin_x = 0.0, double origin_z = 0.0,
             GridProvenance provenance = GridProvenance::single_latent);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const override { return channels_; }
  double cell_width() const { return cell_width_; }
  double origin_x() const { return origin_x_; }
  double origin_z() const { return origin_z_; }
  GridProvenance provenance() const { return provenance_; }
  double extent_x() const { return width_ * cell_width_; }
  double extent_z() const { return height_ * cell_width_; }

  const std::vector<float>& features() const { return features_; }
  std::span<const float> cell(int row, int col) const;

  GridCoord world_to_grid(double x, double z) const;
  void grid_to_world(const GridCoord& g, double& x, double& z) const;

  bool contains(double x, double z) const;

  /// Bilinear interpolation between the four surrounding cell centers, with
  /// the neighborhood clamped at the border. Throws out_of_bounds outside the
  /// world extent.
  std::vector<float> interpolate_feature(double x, double z) const;
  bool interpolate(double x, double z, float* out) const override;

  bool operator==(const LayoutGrid& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_ && features_ == o.features_ &&
           cell_width_ == o.cell_width_ && origin_x_ == o.origin_x_ && origin_z_ == o.origin_z_ &&
           provenance_ == o.provenance_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> features_;
  double cell_width_ = kDefaultCellWidth;
  double origin_x_ = 0.0;
  double origin_z_ = 0.0;
  GridProvenance provenance_ = GridProvenance::single_latent;
};

/// Bilinear weights and clamped corner indices for a continuous cell-center
/// coordinate (fx along columns, fz along rows) on an n_rows x n_cols lattice.
struct BilinearTap {
  int row0, row1, col0, col1;
  float w[4];  // (row0,col0) (row0,col1) (row1,col0) (row1,col1)
};
BilinearTap bilinear_tap(double fz, double fx, int n_rows, int n_cols);

}  // namespace terra
