// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/extension/layout_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/extension/soat.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {
namespace {

using Key = std::pair<std::int64_t, std::int64_t>;
constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

FloatImage make_tile(const GeneratorStack& stack, std::uint64_t seed, std::int64_t a, std::int64_t b) {
  const int dim = stack.config().latent_dim;
  return synthesize_subgrid({lattice_code(seed, a, b, dim), lattice_code(seed, a, b + 1, dim),
                             lattice_code(seed, a + 1, b, dim), lattice_code(seed, a + 1, b + 1, dim)},
                            stack);
}

// tiles: (p-1,q-1) (p-1,q) (p,q-1) (p,q)
LayoutSnapshot::Chunk blend_chunk(const GeneratorStack& stack, std::int64_t p, std::int64_t q,
                                  const std::array<const FloatImage*, 4>& tiles) {
  const int n = stack.output_resolution();
  const int margin = stack.receptive_radius();
  const int ch = stack.output_channels();
  LayoutSnapshot::Chunk out(static_cast<std::size_t>(n) * n * ch);
  const auto& kern = simd::kernels();
  for (int i = 0; i < n; ++i) {
    const AxisBlend br = axis_blend(p * n + i, n, margin, -kUnbounded, kUnbounded);
    for (int j = 0; j < n; ++j) {
      const AxisBlend bc = axis_blend(q * n + j, n, margin, -kUnbounded, kUnbounded);
      float w[4];
      const float* src[4];
      int k = 0;
      for (int ti = 0; ti < 2; ++ti)
        for (int tj = 0; tj < 2; ++tj, ++k) {
          const std::int64_t a = br.tile[ti];
          const std::int64_t b = bc.tile[tj];
          const FloatImage& tile = *tiles[static_cast<std::size_t>((a - (p - 1)) * 2 + (b - (q - 1)))];
          src[k] = tile.pixel(static_cast<int>(q * n + j - b * n), static_cast<int>(p * n + i - a * n)).data();
          w[k] = br.weight[ti] * bc.weight[tj];
        }
      kern.lerp4(ch, w, src[0], src[1], src[2], src[3], out.data() + (static_cast<std::size_t>(i) * n + j) * ch);
    }
  }
  return out;
}

}  // namespace

ChunkRect ChunkRect::united(const ChunkRect& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  return {std::min(row0, o.row0), std::min(col0, o.col0), std::max(row1, o.row1), std::max(col1, o.col1)};
}

LayoutSnapshot::LayoutSnapshot(int chunk_cells, int channels, double cell_width, ChunkRect extent,
                               std::map<Key, std::shared_ptr<const Chunk>> chunks)
    : chunk_cells_(chunk_cells),
      channels_(channels),
      cell_width_(cell_width),
      extent_(extent),
      chunks_(std::move(chunks)) {}

const float* LayoutSnapshot::cell(std::int64_t row, std::int64_t col) const {
  const std::int64_t p = floor_div(row, chunk_cells_);
  const std::int64_t q = floor_div(col, chunk_cells_);
  if (!extent_.contains(p, q)) return nullptr;
  auto it = chunks_.find({p, q});
  if (it == chunks_.end()) return nullptr;
  const std::int64_t i = row - p * chunk_cells_;
  const std::int64_t j = col - q * chunk_cells_;
  return it->second->data() + (static_cast<std::size_t>(i) * chunk_cells_ + j) * channels_;
}

bool LayoutSnapshot::interpolate(double x, double z, float* out) const {
  if (!std::isfinite(x) || !std::isfinite(z)) return false;
  const double fx = x / cell_width_ - 0.5;
  const double fz = z / cell_width_ - 0.5;
  const double lo = -1e15;
  if (fx < lo || fz < lo || fx > -lo || fz > -lo) return false;
  const auto c0 = static_cast<std::int64_t>(std::floor(fx));
  const auto r0 = static_cast<std::int64_t>(std::floor(fz));
  const float* p00 = cell(r0, c0);
  const float* p01 = cell(r0, c0 + 1);
  const float* p10 = cell(r0 + 1, c0);
  const float* p11 = cell(r0 + 1, c0 + 1);
  if (!p00 || !p01 || !p10 || !p11) return false;
  const double tx = fx - static_cast<double>(c0);
  const double tz = fz - static_cast<double>(r0);
  const float w[4] = {static_cast<float>((1.0 - tz) * (1.0 - tx)), static_cast<float>((1.0 - tz) * tx),
                      static_cast<float>(tz * (1.0 - tx)), static_cast<float>(tz * tx)};
  simd::kernels().lerp4(channels_, w, p00, p01, p10, p11, out);
  return true;
}

LayoutGrid LayoutSnapshot::to_grid() const {
  require(!extent_.empty(), ErrorCode::out_of_bounds, "no materialized layout to export");
  const int n = chunk_cells_;
  const auto rows = static_cast<int>((extent_.row1 - extent_.row0) * n);
  const auto cols = static_cast<int>((extent_.col1 - extent_.col0) * n);
  std::vector<float> features(static_cast<std::size_t>(rows) * cols * channels_);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const float* src = cell(extent_.row0 * n + r, extent_.col0 * n + c);
      std::copy_n(src, channels_, features.data() + (static_cast<std::size_t>(r) * cols + c) * channels_);
    }
  return LayoutGrid(rows, cols, channels_, std::move(features), cell_width_, min_x(), min_z(),
                    GridProvenance::extended);
}

LayoutWorld::LayoutWorld(std::shared_ptr<const GeneratorStack> stack, std::uint64_t world_seed, double cell_width)
    : stack_(std::move(stack)), world_seed_(world_seed), cell_width_(cell_width) {
  require(stack_ != nullptr, ErrorCode::configuration, "layout world needs a generator");
  require(2 * stack_->receptive_radius() < stack_->output_resolution(), ErrorCode::configuration,
          "generator receptive radius too large for overlap stitching");
  current_ = std::make_shared<LayoutSnapshot>(stack_->output_resolution(), stack_->output_channels(), cell_width_,
                                              ChunkRect{}, std::map<Key, std::shared_ptr<const LayoutSnapshot::Chunk>>{});
}

std::shared_ptr<const LayoutSnapshot> LayoutWorld::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

ChunkRect LayoutWorld::chunks_for_box(double x0, double z0, double x1, double z1) const {
  const double size = chunk_cells() * cell_width_;
  // Pad by one cell so bilinear neighbors of edge samples are included.
  const double pad = cell_width_;
  return {static_cast<std::int64_t>(std::floor((z0 - pad) / size)),
          static_cast<std::int64_t>(std::floor((x0 - pad) / size)),
          static_cast<std::int64_t>(std::floor((z1 + pad) / size)) + 1,
          static_cast<std::int64_t>(std::floor((x1 + pad) / size)) + 1};
}

LayoutSnapshot::Chunk LayoutWorld::build_chunk(const GeneratorStack& stack, std::uint64_t world_seed, std::int64_t p,
                                               std::int64_t q) {
  std::array<FloatImage, 4> tiles;
  parallel_for(4, [&](std::size_t k) {
    tiles[k] = make_tile(stack, world_seed, p - 1 + static_cast<std::int64_t>(k / 2), q - 1 + static_cast<std::int64_t>(k % 2));
  });
  return blend_chunk(stack, p, q, {&tiles[0], &tiles[1], &tiles[2], &tiles[3]});
}

std::shared_ptr<const LayoutSnapshot> LayoutWorld::materialize(const ChunkRect& rect) {
  std::lock_guard writer(writer_mutex_);
  auto base = snapshot();
  const ChunkRect target = base->extent().united(rect);
  if (base->extent() == target) return base;

  auto chunks = base->chunks();
  std::map<Key, FloatImage> tiles;
  for (std::int64_t p = target.row0; p < target.row1; ++p) {
    std::vector<std::int64_t> cols;
    for (std::int64_t q = target.col0; q < target.col1; ++q)
      if (!chunks.count({p, q})) cols.push_back(q);
    if (cols.empty()) continue;

    // Tile rows p-1 and p; drop anything older.
    for (auto it = tiles.begin(); it != tiles.end();) it = it->first.first < p - 1 ? tiles.erase(it) : std::next(it);
    std::vector<Key> missing;
    for (std::int64_t q : cols)
      for (std::int64_t a = p - 1; a <= p; ++a)
        for (std::int64_t b = q - 1; b <= q; ++b)
          if (!tiles.count({a, b}) && std::find(missing.begin(), missing.end(), Key{a, b}) == missing.end())
            missing.push_back({a, b});
    std::vector<FloatImage> built(missing.size());
    parallel_for(missing.size(), [&](std::size_t i) {
      built[i] = make_tile(*stack_, world_seed_, missing[i].first, missing[i].second);
    });
    for (std::size_t i = 0; i < missing.size(); ++i) tiles.emplace(missing[i], std::move(built[i]));

    std::vector<LayoutSnapshot::Chunk> row_chunks(cols.size());
    parallel_for(cols.size(), [&](std::size_t i) {
      const std::int64_t q = cols[i];
      row_chunks[i] = blend_chunk(*stack_, p, q,
                                  {&tiles.at({p - 1, q - 1}), &tiles.at({p - 1, q}), &tiles.at({p, q - 1}),
                                   &tiles.at({p, q})});
    });
    for (std::size_t i = 0; i < cols.size(); ++i)
      chunks.emplace(Key{p, cols[i]}, std::make_shared<const LayoutSnapshot::Chunk>(std::move(row_chunks[i])));
  }
  auto next = std::make_shared<const LayoutSnapshot>(chunk_cells(), stack_->output_channels(), cell_width_, target,
                                                     std::move(chunks));
  std::lock_guard lock(snapshot_mutex_);
  current_ = next;
  return next;
}

void LayoutWorld::install(const ChunkRect& extent,
                          std::map<Key, std::shared_ptr<const LayoutSnapshot::Chunk>> chunks) {
  std::lock_guard writer(writer_mutex_);
  for (std::int64_t p = extent.row0; p < extent.row1; ++p)
    for (std::int64_t q = extent.col0; q < extent.col1; ++q)
      require(chunks.count({p, q}) == 1, ErrorCode::configuration, "cached layout is missing a chunk");
  auto next = std::make_shared<const LayoutSnapshot>(chunk_cells(), stack_->output_channels(), cell_width_, extent,
                                                     std::move(chunks));
  std::lock_guard lock(snapshot_mutex_);
  current_ = next;
}

}  // namespace terra
