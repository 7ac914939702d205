// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "terra/world/world.hpp"

namespace terra {

/// World container layout (little-endian):
///   magic "TERRAWLD", u32 version,
///   u32 manifest length, manifest JSON, 64 hex digits of its SHA-256,
///   then for each section listed in the manifest: u64 length, bytes.
/// The manifest records every section's name, length and SHA-256.
struct WorldFile {
  static constexpr char kMagic[9] = "TERRAWLD";
  static constexpr std::uint32_t kVersion = 1;
};

struct SaveOptions {
  /// Embed the materialized layout chunks so loading skips synthesis.
  bool include_layout = false;
};

std::vector<std::uint8_t> serialize_world(const World& world, const SaveOptions& options = {});
/// Verifies every digest before building the world; throws version, digest
/// or truncated errors without returning a partial world.
std::unique_ptr<World> parse_world(std::span<const std::uint8_t> bytes);

void save_world(const World& world, const std::string& path, const SaveOptions& options = {});
std::unique_ptr<World> load_world(const std::string& path);

}  // namespace terra
