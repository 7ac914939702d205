// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/extension/soat.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

double stitch_weight(int t, int n, int margin) {
  const double half_support = static_cast<double>(n - margin);
  return std::max(0.0, 1.0 - std::abs(t + 0.5 - n) / half_support);
}

AxisBlend axis_blend(std::int64_t r, int n, int margin, std::int64_t tile_lo, std::int64_t tile_hi) {
  AxisBlend out;
  const std::int64_t hi = floor_div(r, n);
  double w[2] = {0.0, 0.0};
  double total = 0.0;
  for (std::int64_t a = hi - 1; a <= hi; ++a) {
    if (a < tile_lo || a >= tile_hi) continue;
    const int t = static_cast<int>(r - a * n);
    out.tile[out.count] = a;
    w[out.count] = stitch_weight(t, n, margin);
    total += w[out.count];
    ++out.count;
  }
  require(out.count > 0, ErrorCode::out_of_bounds, "cell " + std::to_string(r) + " is not covered by any sub-grid");
  if (total > 0.0) {
    for (int i = 0; i < out.count; ++i) out.weight[i] = static_cast<float>(w[i] / total);
  } else {
    // Outer padding margin: only the edge tile reaches here.
    for (int i = 0; i < out.count; ++i) out.weight[i] = 1.0f / static_cast<float>(out.count);
  }
  return out;
}

bool ExtendedLayout::is_border(int row, int col) const {
  return row < border_margin || col < border_margin || row >= grid.height() - border_margin ||
         col >= grid.width() - border_margin;
}

ExtendedLayout extend_layout(const LatentLattice& lattice, const GeneratorStack& stack, double cell_width,
                             double origin_x, double origin_z) {
  require(lattice.rows >= 2 && lattice.cols >= 2, ErrorCode::argument,
          "lattice must be at least 2x2 to extend, got " + std::to_string(lattice.rows) + "x" +
              std::to_string(lattice.cols));
  require(lattice.codes.size() == static_cast<std::size_t>(lattice.rows) * lattice.cols, ErrorCode::argument,
          "lattice code count does not match its shape");
  const int n = stack.output_resolution();
  const int margin = stack.receptive_radius();
  require(2 * margin < n, ErrorCode::configuration, "generator receptive radius too large for overlap stitching");
  const int tiles_r = lattice.rows - 1;
  const int tiles_c = lattice.cols - 1;

  std::vector<FloatImage> tiles(static_cast<std::size_t>(tiles_r) * tiles_c);
  for (int a = 0; a < tiles_r; ++a)
    for (int b = 0; b < tiles_c; ++b)
      tiles[static_cast<std::size_t>(a) * tiles_c + b] = synthesize_subgrid(
          {lattice.at(a, b), lattice.at(a, b + 1), lattice.at(a + 1, b), lattice.at(a + 1, b + 1)}, stack);

  const int channels = stack.output_channels();
  const int out_h = lattice.rows * n;
  const int out_w = lattice.cols * n;
  std::vector<float> features(static_cast<std::size_t>(out_h) * out_w * channels);
  const auto& kern = simd::kernels();
  parallel_for(static_cast<std::size_t>(out_h), [&](std::size_t row) {
    const auto r = static_cast<std::int64_t>(row);
    const AxisBlend br = axis_blend(r, n, margin, 0, tiles_r);
    for (int c = 0; c < out_w; ++c) {
      const AxisBlend bc = axis_blend(c, n, margin, 0, tiles_c);
      float w[4] = {0, 0, 0, 0};
      const float* p[4] = {nullptr, nullptr, nullptr, nullptr};
      int used = 0;
      for (int i = 0; i < br.count; ++i)
        for (int j = 0; j < bc.count; ++j) {
          const FloatImage& tile = tiles[static_cast<std::size_t>(br.tile[i]) * tiles_c + bc.tile[j]];
          p[used] = tile.pixel(static_cast<int>(c - bc.tile[j] * n), static_cast<int>(r - br.tile[i] * n)).data();
          w[used] = br.weight[i] * bc.weight[j];
          ++used;
        }
      for (int k = used; k < 4; ++k) p[k] = p[0];
      kern.lerp4(channels, w, p[0], p[1], p[2], p[3],
                 features.data() + (static_cast<std::size_t>(row) * out_w + c) * channels);
    }
  });
  return {LayoutGrid(out_h, out_w, channels, std::move(features), cell_width, origin_x, origin_z,
                     GridProvenance::extended),
          margin};
}

}  // namespace terra
