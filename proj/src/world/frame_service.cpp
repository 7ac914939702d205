// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/world/frame_service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include <httplib.h>

#include "terra/common/digest.hpp"
#include "terra/common/error.hpp"
#include "terra/render/float_image.hpp"

namespace terra {

namespace {

constexpr int kMaxResolution = 2048;

ByteImage to_rgb8(const FloatImage& img) { return to_bytes(img); }

nlohmann::json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::argument:
    case ErrorCode::configuration:
    case ErrorCode::out_of_bounds:
    case ErrorCode::version:
    case ErrorCode::digest:
    case ErrorCode::truncated:
      return 400;
    default:
      return 500;
  }
}

}  // namespace

FrameRequest FrameRequest::from_json(const nlohmann::json& j) {
  try {
    require(j.is_object(), ErrorCode::argument, "frame request must be a JSON object");
    FrameRequest r;
    const auto pos = j.at("position").get<std::vector<double>>();
    require(pos.size() == 3, ErrorCode::argument, "position needs three values");
    const Vec3 p(pos[0], pos[1], pos[2]);
    const double fov = j.value("fov_y_deg", 60.0);
    const int w = j.value("width", 256);
    const int h = j.value("height", 256);
    if (j.contains("orientation")) {
      const auto q = j.at("orientation").get<std::vector<double>>();
      require(q.size() == 4, ErrorCode::argument, "orientation needs four values (w, x, y, z)");
      r.camera.position = p;
      r.camera.orientation = Quat(q[0], q[1], q[2], q[3]);
      r.camera.fov_y_deg = fov;
      r.camera.width = w;
      r.camera.height = h;
    } else {
      r.camera = Camera::look(p, j.value("yaw", 0.0), j.value("pitch", 0.0), fov, w, h);
    }
    r.camera.validate();
    require(w <= kMaxResolution && h <= kMaxResolution, ErrorCode::argument,
            "resolution above " + std::to_string(kMaxResolution));
    if (j.contains("layers")) r.layers = j.at("layers").get<std::vector<std::string>>();
    require(!r.layers.empty(), ErrorCode::argument, "request at least one layer");
    for (const auto& l : r.layers)
      require(std::find(frame_layers().begin(), frame_layers().end(), l) != frame_layers().end(),
              ErrorCode::argument, "unknown layer '" + l + "'");
    r.supersample = j.value("supersample", 1);
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::argument, std::string("malformed frame request: ") + e.what());
  }
}

nlohmann::json FrameRequest::to_json() const {
  const Quat& q = camera.orientation;
  return {{"position", {camera.position.x(), camera.position.y(), camera.position.z()}},
          {"orientation", {q.w(), q.x(), q.y(), q.z()}},
          {"fov_y_deg", camera.fov_y_deg},
          {"width", camera.width},
          {"height", camera.height},
          {"layers", layers},
          {"supersample", supersample}};
}

nlohmann::json FrameResponse::header() const {
  nlohmann::json h;
  h["frame_id"] = frame_id;
  h["extent"] = extent;
  h["payloads"] = nlohmann::json::array();
  for (const auto& p : payloads) h["payloads"].push_back({{"layer", p.layer}, {"format", p.format}, {"length", p.bytes.size()}});
  return h;
}

std::vector<std::uint8_t> FrameResponse::encode() const {
  const std::string head = header().dump() + "\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  for (const auto& p : payloads) out.insert(out.end(), p.bytes.begin(), p.bytes.end());
  return out;
}

FrameResponse FrameResponse::decode(std::span<const std::uint8_t> bytes) {
  const auto nl = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
  require(nl != bytes.end(), ErrorCode::truncated, "frame envelope lacks a header line");
  FrameResponse r;
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.begin(), nl);
    r.frame_id = h.at("frame_id").get<std::string>();
    r.extent = h.at("extent");
    std::size_t pos = static_cast<std::size_t>(nl - bytes.begin()) + 1;
    for (const auto& p : h.at("payloads")) {
      FramePayload fp;
      fp.layer = p.at("layer").get<std::string>();
      fp.format = p.at("format").get<std::string>();
      const auto n = p.at("length").get<std::size_t>();
      require(n <= bytes.size() - pos, ErrorCode::truncated, "frame payload '" + fp.layer + "' is truncated");
      fp.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
      pos += n;
      r.payloads.push_back(std::move(fp));
    }
    require(pos == bytes.size(), ErrorCode::argument, "frame envelope has trailing bytes");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::argument, std::string("malformed frame header: ") + e.what());
  }
  return r;
}

nlohmann::json extent_json(const World& world) {
  const ChunkRect e = world.extent();
  nlohmann::json j = {{"row0", e.row0}, {"col0", e.col0}, {"row1", e.row1}, {"col1", e.col1}, {"unbounded", world.oracle() != nullptr}};
  if (!world.oracle()) {
    const double size = world.layout().chunk_cells() * world.layout().cell_width();
    j["chunk_size"] = size;
    j["min_x"] = static_cast<double>(e.col0) * size;
    j["max_x"] = static_cast<double>(e.col1) * size;
    j["min_z"] = static_cast<double>(e.row0) * size;
    j["max_z"] = static_cast<double>(e.row1) * size;
  }
  return j;
}

nlohmann::json FrameService::world_info() const {
  const WorldSpec& s = world_.spec();
  nlohmann::json j;
  j["format_version"] = WorldSpec::kFormatVersion;
  j["identity"] = world_.identity();
  j["digests"] = world_.digests();
  j["seeds"] = {{"world", s.world_seed},       {"generator", s.generator_seed}, {"decoder", s.decoder_seed},
                {"refiner", s.refiner_seed},   {"projection", s.projection_seed}, {"noise", s.noise_seed},
                {"sky", s.sky_seed}};
  j["config"] = {{"near", s.render.near},
                 {"far", s.render.far},
                 {"samples", s.render.samples},
                 {"fov_y_deg", 60.0},
                 {"cell_width", s.cell_width},
                 {"layout_resolution", s.generator_config().output_resolution},
                 {"refine_factor", world_.refiner().factor()},
                 {"refiner", world_.refiner().kind()},
                 {"backend", s.backend},
                 {"disparity_clip", 0.05},
                 {"disparity_scale", 1.0 / 16.0},
                 {"auto_extend", s.auto_extend},
                 {"extend_margin", s.extend_margin}};
  j["spec"] = s.to_json();
  j["extent"] = extent_json(world_);
  j["layers"] = frame_layers();
  return j;
}

FrameResponse FrameService::frame(const FrameRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const FrameOutput out = world_.render(request.camera, request.supersample);
  FrameResponse r;
  r.frame_id = sha256_hex(world_.identity() + "\n" + request.to_json().dump()).substr(0, 32);
  for (const auto& layer : request.layers) {
    FramePayload p;
    p.layer = layer;
    if (layer == "full" || layer == "rgb_lr" || layer == "dome") {
      p.format = "png";
      const FloatImage& img = layer == "full" ? out.full : layer == "rgb_lr" ? out.lr.rgb : out.dome;
      p.bytes = encode_png(to_rgb8(img));
    } else {
      p.format = "tfb1";
      const FloatImage& img = layer == "disparity" ? out.hr.disparity : layer == "mask" ? out.hr.mask : out.lr.noise;
      p.bytes = encode_float_image(img);
    }
    r.payloads.push_back(std::move(p));
  }
  r.extent = extent_json(world_);
  r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json FrameService::extend(const nlohmann::json& body) {
  try {
    require(!world_.oracle(), ErrorCode::argument, "analytic worlds are unbounded and cannot be extended");
    ChunkRect rect;
    if (body.contains("chunks")) {
      const auto& c = body.at("chunks");
      rect = {c.at("row0").get<std::int64_t>(), c.at("col0").get<std::int64_t>(), c.at("row1").get<std::int64_t>(),
              c.at("col1").get<std::int64_t>()};
    } else {
      const auto b = body.at("box").get<std::vector<double>>();
      require(b.size() == 4 && std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); }),
              ErrorCode::argument, "box needs four finite values");
      require(b[2] >= b[0] && b[3] >= b[1], ErrorCode::argument, "box needs min <= max");
      rect = world_.layout().chunks_for_box(b[0], b[1], b[2], b[3]);
    }
    require(!rect.empty(), ErrorCode::argument, "extension region is empty");
    require(rect.row1 - rect.row0 <= 64 && rect.col1 - rect.col0 <= 64, ErrorCode::argument,
            "extension region larger than 64x64 chunks");
    world_.extend(rect);
    return {{"extent", extent_json(world_)}};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::argument, std::string("malformed extend request: ") + e.what());
  }
}

ServiceReply FrameService::handle(const std::string& method, const std::string& path, const std::string& body) {
  ServiceReply reply;
  reply.content_type = "application/json";
  try {
    if (path == "/world_info" && method == "GET") {
      reply.body = world_info().dump();
    } else if (path == "/frame" && method == "POST") {
      const auto req = FrameRequest::from_json(nlohmann::json::parse(body));
      const FrameResponse r = frame(req);
      const auto bytes = r.encode();
      reply.content_type = "application/octet-stream";
      reply.body.assign(bytes.begin(), bytes.end());
      reply.timing_ms = r.timing_ms;
    } else if (path == "/extend" && method == "POST") {
      reply.body = extend(nlohmann::json::parse(body)).dump();
    } else {
      reply.status = 404;
      reply.body = error_json("not_found", method + " " + path).dump();
    }
  } catch (const Error& e) {
    reply.status = status_for(e.code());
    reply.content_type = "application/json";
    reply.body = error_json(std::string(to_string(e.code())), e.what()).dump();
  } catch (const nlohmann::json::exception& e) {
    reply.status = 400;
    reply.content_type = "application/json";
    reply.body = error_json("argument", std::string("malformed JSON: ") + e.what()).dump();
  } catch (const std::exception& e) {
    reply.status = 500;
    reply.content_type = "application/json";
    reply.body = error_json("internal", e.what()).dump();
  }
  return reply;
}

struct FrameService::Server {
  httplib::Server http;
};

int FrameService::bind(const std::string& host, int port) {
  server_ = std::make_shared<Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const ServiceReply r = handle(req.method, req.path, req.body);
    res.status = r.status;
    if (r.timing_ms > 0.0) res.set_header("X-Render-Ms", std::to_string(r.timing_ms));
    res.set_content(r.body, r.content_type);
  };
  server_->http.Get("/world_info", route);
  server_->http.Post("/frame", route);
  server_->http.Post("/extend", route);
  if (port == 0) {
    port = server_->http.bind_to_any_port(host);
    require(port > 0, ErrorCode::io, "cannot bind " + host + " to a free port");
  } else {
    require(server_->http.bind_to_port(host, port), ErrorCode::io,
            "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void FrameService::listen() {
  require(server_ != nullptr, ErrorCode::argument, "bind() must precede listen()");
  server_->http.listen_after_bind();
}

void FrameService::serve(const std::string& host, int port) {
  bind(host, port);
  listen();
}

void FrameService::stop() {
  if (server_) server_->http.stop();
}

std::pair<std::string, int> parse_bind_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  require(colon != std::string::npos, ErrorCode::argument, "bind address must look like host:port");
  std::string host = addr.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(addr.substr(colon + 1), &used);
    require(used == addr.size() - colon - 1, ErrorCode::argument, "bad port");
  } catch (const std::logic_error&) {
    fail(ErrorCode::argument, "bad port in '" + addr + "'");
  }
  require(port >= 0 && port <= 65535, ErrorCode::argument, "port out of range in '" + addr + "'");
  return {host, port};
}

}  // namespace terra
