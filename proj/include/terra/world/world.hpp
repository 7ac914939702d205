// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "terra/decoder/decoder.hpp"
#include "terra/decoder/heightfield_oracle.hpp"
#include "terra/extension/layout_world.hpp"
#include "terra/metrics/consistency.hpp"
#include "terra/refine/refiner.hpp"
#include "terra/render/renderer.hpp"
#include "terra/sky/skydome.hpp"

namespace terra {

/// Everything, besides embedded weights, that fixes a world's appearance.
struct WorldSpec {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint64_t world_seed = 7;
  /// "standard" (256-cell layout chunks) or "small" (32-cell, for tests).
  std::string generator = "standard";
  std::uint64_t generator_seed = 0;
  /// "neural", "oracle_flat" or "oracle_hills".
  std::string backend = "neural";
  std::uint64_t decoder_seed = 0;
  DecoderConfig decoder;
  /// "identity", "conv" or "file".
  std::string refiner = "identity";
  std::uint64_t refiner_seed = 0;
  std::uint64_t projection_seed = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t sky_seed = 0;
  /// "procedural" or "file".
  std::string sky = "procedural";
  double sky_min_elevation = -15.0;
  double sky_max_elevation = 90.0;
  RenderConfig render;
  int lr_width = 32;
  int lr_height = 32;
  int refine_factor = 8;
  double cell_width = kDefaultCellWidth;
  bool auto_extend = true;
  /// Extra ground distance materialized around each frustum footprint.
  double extend_margin = 16.0;

  /// Spec with all component seeds derived from one world seed.
  static WorldSpec from_seed(std::uint64_t seed);

  nlohmann::json to_json() const;
  static WorldSpec from_json(const nlohmann::json& j);
  GeneratorConfig generator_config() const;
  void validate() const;
};

/// Weights and images that may come from files instead of seeds.
struct WorldAssets {
  std::optional<DecoderWeights> decoder;
  std::optional<WeightContainer> refiner;
  std::optional<FloatImage> sky_panorama;
  /// Cached layout chunks.
  std::optional<std::pair<ChunkRect, std::map<std::pair<std::int64_t, std::int64_t>,
                                              std::shared_ptr<const LayoutSnapshot::Chunk>>>>
      layout;
};

struct FrameOutput {
  RenderBuffers lr;
  RefinedBuffers hr;
  FloatImage dome;
  FloatImage full;
  ChunkRect extent;

  /// Final frame with RGB clamped to [0, 1].
  Frame frame() const;
};

class World {
 public:
  explicit World(WorldSpec spec, WorldAssets assets = {});

  const WorldSpec& spec() const { return spec_; }
  bool neural() const { return spec_.backend == "neural"; }
  const DecoderWeights& decoder() const { return *decoder_; }
  const Refiner& refiner() const { return *refiner_; }
  const ConvRefiner* conv_refiner() const { return conv_; }
  const SkyDome& sky() const { return *sky_; }
  const ProjectionP& projection() const { return projection_; }
  const NoiseGrid& noise() const { return noise_; }
  const HeightfieldOracle* oracle() const { return oracle_.get(); }
  LayoutWorld& layout() { return *layout_; }
  const LayoutWorld& layout() const { return *layout_; }

  /// Materialized chunk rectangle (empty for oracle worlds).
  ChunkRect extent() const;
  /// Grows the layout to cover the rectangle; idempotent.
  ChunkRect extend(const ChunkRect& rect);
  /// Materializes everything a camera can sample plus the margin (when
  /// auto-extend is on).
  void prepare(const Camera& camera);

  /// Field over the current snapshot.
  std::shared_ptr<const RadianceField> field() const;

  /// Full pipeline. `camera` carries the output resolution, which must be a
  /// multiple of the refine factor.
  FrameOutput render(const Camera& camera, int supersample = 1);
  FrameRenderer frame_renderer(int supersample = 1);

  /// Stable digests of every component, for world_info and frame ids.
  nlohmann::json digests() const;
  std::string identity() const;

 private:
  WorldSpec spec_;
  std::shared_ptr<const GeneratorStack> stack_;
  std::unique_ptr<LayoutWorld> layout_;
  std::shared_ptr<const DecoderWeights> decoder_;
  std::shared_ptr<const HeightfieldOracle> oracle_;
  std::unique_ptr<const Refiner> refiner_;
  const ConvRefiner* conv_ = nullptr;
  std::unique_ptr<const SkyDome> sky_;
  ProjectionP projection_;
  NoiseGrid noise_;
};

}  // namespace terra
