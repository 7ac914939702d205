// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/world/world_file.hpp"

#include <cstring>
#include <utility>

#include "terra/common/bytes.hpp"
#include "terra/common/digest.hpp"
#include "terra/common/error.hpp"
#include "terra/render/float_image.hpp"

namespace terra {

namespace {

using ChunkMap = std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const LayoutSnapshot::Chunk>>;

std::vector<std::uint8_t> encode_layout(const LayoutSnapshot& snap) {
  ByteWriter w;
  const ChunkRect& e = snap.extent();
  for (std::int64_t v : {e.row0, e.col0, e.row1, e.col1}) w.u64(static_cast<std::uint64_t>(v));
  w.u32(static_cast<std::uint32_t>(snap.chunk_cells()));
  w.u32(static_cast<std::uint32_t>(snap.channels()));
  w.u64(snap.chunks().size());
  for (const auto& [key, chunk] : snap.chunks()) {
    w.u64(static_cast<std::uint64_t>(key.first));
    w.u64(static_cast<std::uint64_t>(key.second));
    w.f32s(*chunk);
  }
  return w.take();
}

std::pair<ChunkRect, ChunkMap> decode_layout(std::span<const std::uint8_t> bytes, int cells, int channels) {
  ByteReader r(bytes, "layout section");
  ChunkRect e;
  e.row0 = static_cast<std::int64_t>(r.u64());
  e.col0 = static_cast<std::int64_t>(r.u64());
  e.row1 = static_cast<std::int64_t>(r.u64());
  e.col1 = static_cast<std::int64_t>(r.u64());
  require(static_cast<int>(r.u32()) == cells && static_cast<int>(r.u32()) == channels, ErrorCode::configuration,
          "cached layout does not match the generator");
  const std::uint64_t count = r.u64();
  ChunkMap chunks;
  const std::size_t n = static_cast<std::size_t>(cells) * cells * channels;
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto p = static_cast<std::int64_t>(r.u64());
    const auto q = static_cast<std::int64_t>(r.u64());
    chunks[{p, q}] = std::make_shared<const LayoutSnapshot::Chunk>(r.f32s(n));
  }
  require(r.done(), ErrorCode::configuration, "layout section has trailing bytes");
  return {e, std::move(chunks)};
}

}  // namespace

std::vector<std::uint8_t> serialize_world(const World& world, const SaveOptions& options) {
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> sections;
  sections.emplace_back("decoder", world.decoder().to_container().serialize());
  if (world.conv_refiner()) sections.emplace_back("refiner", world.conv_refiner()->to_container().serialize());
  sections.emplace_back("sky", encode_float_image(world.sky().panorama()));
  if (options.include_layout && !world.extent().empty())
    sections.emplace_back("layout", encode_layout(*world.layout().snapshot()));

  nlohmann::json manifest;
  manifest["spec"] = world.spec().to_json();
  manifest["sections"] = nlohmann::json::array();
  for (const auto& [name, bytes] : sections)
    manifest["sections"].push_back({{"name", name}, {"length", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  const std::string text = manifest.dump();

  ByteWriter w;
  w.raw(std::string(WorldFile::kMagic));
  w.u32(WorldFile::kVersion);
  w.str(text);
  w.raw(sha256_hex(text));
  for (const auto& [name, bytes] : sections) {
    w.u64(bytes.size());
    w.raw(bytes);
  }
  return w.take();
}

std::unique_ptr<World> parse_world(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "world file");
  const auto magic = r.take(8);
  require(std::memcmp(magic.data(), WorldFile::kMagic, 8) == 0, ErrorCode::configuration, "not a world file");
  const std::uint32_t version = r.u32();
  require(version == WorldFile::kVersion, ErrorCode::version,
          "world file version " + std::to_string(version) + " is not supported (this build reads version " +
              std::to_string(WorldFile::kVersion) + ")");
  const std::string text = r.str();
  const auto stored = r.take(64);
  require(std::string(stored.begin(), stored.end()) == sha256_hex(text), ErrorCode::digest,
          "world manifest digest mismatch");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::configuration, std::string("malformed world manifest: ") + e.what());
  }
  const WorldSpec spec = WorldSpec::from_json(manifest.at("spec"));

  WorldAssets assets;
  try {
    for (const auto& s : manifest.at("sections")) {
      const auto name = s.at("name").get<std::string>();
      const auto length = r.u64();
      require(length == s.at("length").get<std::uint64_t>(), ErrorCode::digest,
              "section '" + name + "' length disagrees with the manifest");
      const auto body = r.take(static_cast<std::size_t>(length));
      require(sha256_hex(body) == s.at("sha256").get<std::string>(), ErrorCode::digest,
              "section '" + name + "' digest mismatch");
      if (name == "decoder") {
        assets.decoder = DecoderWeights::from_container(WeightContainer::parse(body));
      } else if (name == "refiner") {
        assets.refiner = WeightContainer::parse(body);
      } else if (name == "sky") {
        assets.sky_panorama = decode_float_image(body);
      } else if (name == "layout") {
        const GeneratorConfig g = spec.generator_config();
        assets.layout = decode_layout(body, g.output_resolution, g.output_channels());
      } else {
        fail(ErrorCode::configuration, "unknown world section '" + name + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::configuration, std::string("malformed world manifest: ") + e.what());
  }
  require(r.done(), ErrorCode::configuration, "world file has trailing bytes");
  require(assets.decoder.has_value(), ErrorCode::configuration, "world file lacks decoder weights");
  return std::make_unique<World>(spec, std::move(assets));
}

void save_world(const World& world, const std::string& path, const SaveOptions& options) {
  write_file_bytes(path, serialize_world(world, options));
}

std::unique_ptr<World> load_world(const std::string& path) { return parse_world(read_file_bytes(path)); }

}  // namespace terra
