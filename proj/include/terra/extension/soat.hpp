// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "terra/common/image.hpp"
#include "terra/grid/generator.hpp"
#include "terra/grid/layout_grid.hpp"

namespace terra {

/// Corner weights for a 2x2 code arrangement. The first index runs along
/// rows (u, world z), the second along columns (v, world x).
struct BlendWeights {
  double b00 = 0.0;
  double b01 = 0.0;
  double b10 = 0.0;
  double b11 = 0.0;

  double sum() const { return b00 + b01 + b10 + b11; }
};

BlendWeights blend_weights(double u, double v);

/// Corner codes in order z00, z01, z10, z11.
using CornerCodes = std::array<LatentCode, 4>;

/// One generator layer applied once per corner style over the whole block
/// (zero padding at the block border) and blended with per-location bilinear
/// weights measured in the block's frame at the layer's output resolution.
FloatImage soat_layer(const FloatImage& f, const CornerCodes& codes, std::size_t layer, const GeneratorStack& stack);

/// Same, with the corner styles already mapped.
FloatImage soat_layer_styled(const FloatImage& f, const std::array<std::vector<float>, 4>& styles,
                             std::size_t layer, const GeneratorStack& stack);

/// Full 2x2 sub-grid synthesis: 2H x 2W x C feature block.
FloatImage synthesize_subgrid(const CornerCodes& codes, const GeneratorStack& stack);

/// K x L lattice of codes, row-major (row index along z).
struct LatentLattice {
  int rows = 0;
  int cols = 0;
  std::vector<LatentCode> codes;

  const LatentCode& at(int r, int c) const { return codes[static_cast<std::size_t>(r) * cols + c]; }

  /// Codes hashed from a world seed by lattice position, so any window of an
  /// unbounded lattice can be built in any order.
  static LatentLattice from_world_seed(std::uint64_t world_seed, int row0, int col0, int rows, int cols,
                                       int latent_dim);
};

LatentCode lattice_code(std::uint64_t world_seed, std::int64_t row, std::int64_t col, int latent_dim);

/// Stitch weight of a sub-grid at local coordinate t in [0, 2n): a triangle
/// about the tile center that reaches zero `margin` cells in from the tile
/// edges, so padding-affected cells never contribute where another tile
/// covers the location.
double stitch_weight(int t, int n, int margin);

/// Up to two (tile index, normalized weight) contributions along one axis for
/// global cell coordinate r, with tiles of size 2n at stride n restricted to
/// indices [tile_lo, tile_hi).
struct AxisBlend {
  int count = 0;
  std::int64_t tile[2] = {0, 0};
  float weight[2] = {0.0f, 0.0f};
};
AxisBlend axis_blend(std::int64_t r, int n, int margin, std::int64_t tile_lo, std::int64_t tile_hi);

struct ExtendedLayout {
  LayoutGrid grid;
  /// Cells within this many cells of the grid edge saw zero padding.
  int border_margin = 0;

  bool is_border(int row, int col) const;
};

/// Overlap-add of all (K-1) x (L-1) sub-grids of the lattice. Output is
/// K*H x L*W cells; a 2x2 lattice reproduces its single sub-grid exactly.
ExtendedLayout extend_layout(const LatentLattice& lattice, const GeneratorStack& stack,
                             double cell_width = kDefaultCellWidth, double origin_x = 0.0, double origin_z = 0.0);

}  // namespace terra
