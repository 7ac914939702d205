// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "terra/world/world.hpp"

namespace terra {

/// Buffers a client may ask for.
inline const std::vector<std::string>& frame_layers() {
  static const std::vector<std::string> layers{"full", "rgb_lr", "disparity", "mask", "noise", "dome"};
  return layers;
}

/// Pose plus output options. JSON form:
///   {"position": [x, y, z], "orientation": [w, x, y, z] | "yaw": r, "pitch": r,
///    "fov_y_deg": 60, "width": 256, "height": 256,
///    "layers": ["full", ...], "supersample": 1}
struct FrameRequest {
  Camera camera;
  std::vector<std::string> layers{"full"};
  int supersample = 1;

  static FrameRequest from_json(const nlohmann::json& j);
  /// Canonical form; identical requests give identical text.
  nlohmann::json to_json() const;
};

struct FramePayload {
  std::string layer;
  std::string format;  // "png" (8-bit RGB) or "tfb1" (float container)
  std::vector<std::uint8_t> bytes;
  bool operator==(const FramePayload&) const = default;
};

/// Envelope: one JSON header line terminated by '\n', then the payload bytes
/// back to back in header order. The header carries the frame id and the
/// world's current extent; timing travels outside the envelope, so identical
/// requests against an unchanged extent give identical bodies.
struct FrameResponse {
  std::string frame_id;
  nlohmann::json extent;
  double timing_ms = 0.0;
  std::vector<FramePayload> payloads;

  nlohmann::json header() const;
  std::vector<std::uint8_t> encode() const;
  static FrameResponse decode(std::span<const std::uint8_t> bytes);
};

/// Extent descriptor: chunk rectangle plus its world-space bounds.
nlohmann::json extent_json(const World& world);

/// Result of one HTTP-style exchange, independent of any network layer.
struct ServiceReply {
  int status = 200;
  std::string content_type;
  std::string body;
  double timing_ms = 0.0;
};

/// Request handlers over a world. Rendering reads immutable snapshots;
/// extension is serialized inside the layout world, so handlers may run
/// concurrently.
class FrameService {
 public:
  explicit FrameService(World& world) : world_(world) {}

  nlohmann::json world_info() const;
  FrameResponse frame(const FrameRequest& request);
  /// Body: {"chunks": {"row0", "col0", "row1", "col1"}} or
  /// {"box": [min_x, min_z, max_x, max_z]}. Returns the new extent.
  nlohmann::json extend(const nlohmann::json& body);

  /// Dispatches GET /world_info, POST /frame and POST /extend. Malformed
  /// requests produce a structured JSON error, never an exception.
  ServiceReply handle(const std::string& method, const std::string& path, const std::string& body);

  /// Binds host:port (port 0 picks a free port); returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop() is called.
  void listen();
  /// bind() then listen().
  void serve(const std::string& host, int port);
  void stop();

 private:
  World& world_;
  struct Server;
  std::shared_ptr<Server> server_;
};

/// Parses "host:port" (or ":port").
std::pair<std::string, int> parse_bind_address(const std::string& addr);

}  // namespace terra
