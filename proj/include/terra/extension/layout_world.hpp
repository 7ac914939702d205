// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "terra/grid/generator.hpp"
#include "terra/grid/layout_grid.hpp"

namespace terra {

/// Rectangle of chunks [row0, row1) x [col0, col1). Chunk (p, q) covers
/// global cells rows [p*n, (p+1)*n) and columns [q*n, (q+1)*n).
struct ChunkRect {
  std::int64_t row0 = 0;
  std::int64_t col0 = 0;
  std::int64_t row1 = 0;
  std::int64_t col1 = 0;

  bool empty() const { return row1 <= row0 || col1 <= col0; }
  bool contains(std::int64_t p, std::int64_t q) const { return p >= row0 && p < row1 && q >= col0 && q < col1; }
  bool contains(const ChunkRect& o) const {
    return o.empty() || (o.row0 >= row0 && o.row1 <= row1 && o.col0 >= col0 && o.col1 <= col1);
  }
  ChunkRect united(const ChunkRect& o) const;
  ChunkRect grown(std::int64_t ring) const { return {row0 - ring, col0 - ring, row1 + ring, col1 + ring}; }
  bool operator==(const ChunkRect&) const = default;
};

/// Immutable view of every materialized chunk. Each chunk holds its final
/// values: every sub-grid that overlaps it contributed, so later extension
/// never changes it.
class LayoutSnapshot final : public FeatureField {
 public:
  using Chunk = std::vector<float>;

  LayoutSnapshot(int chunk_cells, int channels, double cell_width, ChunkRect extent,
                 std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const Chunk>> chunks);

  int channels() const override { return channels_; }
  int chunk_cells() const { return chunk_cells_; }
  double cell_width() const { return cell_width_; }
  const ChunkRect& extent() const { return extent_; }
  double chunk_world_size() const { return chunk_cells_ * cell_width_; }

  /// World-space bounds of the materialized rectangle.
  double min_x() const { return extent_.col0 * chunk_world_size(); }
  double max_x() const { return extent_.col1 * chunk_world_size(); }
  double min_z() const { return extent_.row0 * chunk_world_size(); }
  double max_z() const { return extent_.row1 * chunk_world_size(); }

  /// Global cell access; nullptr when the cell is not materialized.
  const float* cell(std::int64_t row, std::int64_t col) const;

  /// Bilinear read that succeeds only when all four neighbor cells are
  /// materialized (no border clamping, so values never change on extension).
  bool interpolate(double x, double z, float* out) const override;

  const std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const Chunk>>& chunks() const {
    return chunks_;
  }

  /// Copies the materialized rectangle into a single grid.
  LayoutGrid to_grid() const;

 private:
  int chunk_cells_;
  int channels_;
  double cell_width_;
  ChunkRect extent_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const Chunk>> chunks_;
};

/// Unbounded layout: lattice codes hashed from the world seed by position,
/// sub-grid (a, b) anchored at cells (a*n, b*n), chunks materialized on
/// demand. Extension is serialized; readers hold immutable snapshots.
class LayoutWorld {
 public:
  LayoutWorld(std::shared_ptr<const GeneratorStack> stack, std::uint64_t world_seed,
              double cell_width = kDefaultCellWidth);

  std::uint64_t world_seed() const { return world_seed_; }
  const GeneratorStack& stack() const { return *stack_; }
  int chunk_cells() const { return stack_->output_resolution(); }
  double cell_width() const { return cell_width_; }

  std::shared_ptr<const LayoutSnapshot> snapshot() const;

  /// Grows the materialized rectangle to cover `rect` (idempotent). Returns
  /// the snapshot that includes it.
  std::shared_ptr<const LayoutSnapshot> materialize(const ChunkRect& rect);

  /// Chunks overlapping the world-space box [x0,x1] x [z0,z1].
  ChunkRect chunks_for_box(double x0, double z0, double x1, double z1) const;

  /// Installs precomputed chunks (from a world file cache).
  void install(const ChunkRect& extent, std::map<std::pair<std::int64_t, std::int64_t>,
                                                 std::shared_ptr<const LayoutSnapshot::Chunk>> chunks);

  /// Computes one chunk from its four overlapping sub-grids.
  static LayoutSnapshot::Chunk build_chunk(const GeneratorStack& stack, std::uint64_t world_seed, std::int64_t p,
                                           std::int64_t q);

 private:
  std::shared_ptr<const GeneratorStack> stack_;
  std::uint64_t world_seed_;
  double cell_width_;
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const LayoutSnapshot> current_;
};

}  // namespace terra
