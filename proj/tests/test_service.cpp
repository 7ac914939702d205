// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <thread>

#include "terra/common/error.hpp"
#include "terra/render/float_image.hpp"
#include "terra/world/frame_service.hpp"

// After Eigen: the resolver headers define a _res macro.
#include <httplib.h>

using namespace terra;
using nlohmann::json;

namespace {

WorldSpec small_spec(std::uint64_t seed) {
  WorldSpec s = WorldSpec::from_seed(seed);
  s.generator = "small";
  s.render.far = 6.0;
  s.render.samples = 48;
  s.extend_margin = 2.0;
  return s;
}

json frame_body(double x = 1.0) {
  return {{"position", {x, 1.0, 0.5}}, {"yaw", 0.4},  {"pitch", -0.2},
          {"width", 32},               {"height", 32}, {"layers", {"full", "disparity", "mask", "noise", "dome", "rgb_lr"}}};
}

}  // namespace

TEST_CASE("frame requests parse into cameras and canonical JSON") {
  const FrameRequest a = FrameRequest::from_json(frame_body());
  CHECK(a.camera == Camera::look({1.0, 1.0, 0.5}, 0.4, -0.2, 60.0, 32, 32));
  CHECK(a.layers.size() == 6);
  CHECK(a.supersample == 1);
  const FrameRequest b = FrameRequest::from_json(a.to_json());
  CHECK(b.camera == a.camera);
  CHECK(b.to_json() == a.to_json());
  json q = {{"position", {0, 1, 0}}, {"orientation", {1, 0, 0, 0}}};
  const FrameRequest c = FrameRequest::from_json(q);
  CHECK(c.camera.forward().isApprox(Vec3(0, 0, -1)));
  CHECK(c.camera.width == 256);
  CHECK(c.layers == std::vector<std::string>{"full"});

  for (json bad : {json{{"position", {0, 1}}}, json{{"position", {0, 1, 0}}, {"layers", {"depth"}}},
                   json{{"position", {0, 1, 0}}, {"width", 4096}}, json{{"position", {0, 1, 0}}, {"fov_y_deg", 0}}}) {
    CAPTURE(bad.dump());
    CHECK_THROWS_AS(FrameRequest::from_json(bad), Error);
  }
}

TEST_CASE("frame envelopes encode and decode losslessly") {
  FrameResponse r;
  r.frame_id = "abc";
  r.extent = {{"row0", 0}};
  r.payloads = {{"full", "png", {1, 2, 3}}, {"mask", "tfb1", {}}, {"noise", "tfb1", {9}}};
  const auto bytes = r.encode();
  const FrameResponse back = FrameResponse::decode(bytes);
  CHECK(back.frame_id == "abc");
  CHECK(back.payloads == r.payloads);
  CHECK(back.extent == r.extent);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
  try {
    FrameResponse::decode(cut);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncated);
  }
}

TEST_CASE("world_info reports constants, seeds and extent") {
  World world(small_spec(31));
  FrameService svc(world);
  const json info = svc.world_info();
  CHECK(info["format_version"] == 1);
  CHECK(info["identity"] == world.identity());
  CHECK(info["config"]["near"] == 1.0);
  CHECK(info["config"]["samples"] == 48);
  CHECK(info["config"]["fov_y_deg"] == 60.0);
  CHECK(info["config"]["cell_width"] == 0.15);
  CHECK(info["config"]["disparity_clip"] == 0.05);
  CHECK(info["config"]["disparity_scale"] == 1.0 / 16.0);
  CHECK(info["config"]["refine_factor"] == 8);
  CHECK(info["seeds"]["world"] == world.spec().world_seed);
  CHECK(info["layers"].size() == frame_layers().size());
  CHECK(info["extent"]["unbounded"] == false);
  CHECK(info["extent"]["chunk_size"].get<double>() == doctest::Approx(32 * 0.15));
  CHECK(WorldSpec::from_json(info["spec"]).to_json() == world.spec().to_json());

  World standard(WorldSpec::from_seed(1));
  const json std_info = FrameService(standard).world_info();
  CHECK(std_info["config"]["far"] == 16.0);
  CHECK(std_info["config"]["samples"] == 128);
  CHECK(std_info["config"]["layout_resolution"] == 256);
}

TEST_CASE("identical frame requests produce identical payloads") {
  World world(small_spec(32));
  FrameService svc(world);
  const FrameRequest req = FrameRequest::from_json(frame_body());
  const FrameResponse a = svc.frame(req);
  svc.frame(FrameRequest::from_json(frame_body(9.0)));
  const FrameResponse b = svc.frame(req);
  CHECK(a.frame_id == b.frame_id);
  CHECK(a.frame_id.size() == 32);
  CHECK(a.payloads == b.payloads);
  CHECK(svc.frame(req).encode() == b.encode());
  REQUIRE(a.payloads.size() == 6);
  CHECK(a.payloads[0].format == "png");
  CHECK(a.payloads[1].format == "tfb1");
  const FloatImage disp = decode_float_image(a.payloads[1].bytes);
  CHECK(disp.width == 32);
  CHECK(disp == world.render(req.camera).hr.disparity);
  CHECK(decode_float_image(a.payloads[3].bytes).width == 4);
  CHECK(svc.frame(FrameRequest::from_json(frame_body(1.5))).frame_id != a.frame_id);
}

TEST_CASE("extend grows the extent and leaves frames unchanged") {
  World world(small_spec(33));
  FrameService svc(world);
  const FrameRequest req = FrameRequest::from_json(frame_body());
  const auto before = svc.frame(req).encode();
  const ChunkRect ext = world.extent();
  const json grown = svc.extend({{"chunks",
                                  {{"row0", ext.row0 - 1}, {"col0", ext.col0 - 1}, {"row1", ext.row1 + 1},
                                   {"col1", ext.col1 + 1}}}});
  CHECK(grown["extent"]["row0"] == ext.row0 - 1);
  CHECK(world.extent() == ext.grown(1));
  const json boxed = svc.extend({{"box", {-20.0, -1.0, -15.0, 1.0}}});
  CHECK(boxed["extent"]["min_x"].get<double>() <= -20.0);
  const auto after = svc.frame(req);
  CHECK(after.payloads == FrameResponse::decode(before).payloads);

  CHECK_THROWS_AS(svc.extend({{"chunks", {{"row0", 0}, {"col0", 0}, {"row1", 100}, {"col1", 1}}}}), Error);
  CHECK_THROWS_AS(svc.extend({{"box", {1.0, 1.0, 0.0, 0.0}}}), Error);
  CHECK_THROWS_AS(svc.extend(json::object()), Error);
}

TEST_CASE("malformed requests become structured errors") {
  World world(small_spec(34));
  FrameService svc(world);
  for (const auto& [method, path, body, status] :
       std::vector<std::tuple<std::string, std::string, std::string, int>>{
           {"POST", "/frame", "{not json", 400},
           {"POST", "/frame", R"({"position": [0, 1]})", 400},
           {"POST", "/frame", R"({"position": [0, 1, 0], "width": 30, "height": 32})", 400},
           {"POST", "/extend", R"({"box": "wide"})", 400},
           {"GET", "/nowhere", "", 404},
           {"DELETE", "/frame", "", 404}}) {
    CAPTURE(path);
    CAPTURE(body);
    const ServiceReply r = svc.handle(method, path, body);
    CHECK(r.status == status);
    CHECK(r.content_type == "application/json");
    const json j = json::parse(r.body);
    CHECK(j["error"]["code"].is_string());
    CHECK(!j["error"]["message"].get<std::string>().empty());
  }
  WorldSpec oracle = small_spec(35);
  oracle.backend = "oracle_flat";
  World flat(oracle);
  const ServiceReply r = FrameService(flat).handle("POST", "/extend", R"({"box": [0, 0, 1, 1]})");
  CHECK(r.status == 400);
}

TEST_CASE("bind addresses parse host and port") {
  CHECK(parse_bind_address("0.0.0.0:8080") == std::pair<std::string, int>{"0.0.0.0", 8080});
  CHECK(parse_bind_address(":9000") == std::pair<std::string, int>{"127.0.0.1", 9000});
  CHECK_THROWS_AS(parse_bind_address("localhost"), Error);
  CHECK_THROWS_AS(parse_bind_address("host:99999"), Error);
  CHECK_THROWS_AS(parse_bind_address("host:80x"), Error);
}

TEST_CASE("HTTP endpoint serves the same bytes as the in-process handler") {
  World world(small_spec(36));
  FrameService svc(world);
  const int port = svc.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread server([&] { svc.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(120, 0);
  client.set_keep_alive(true);

  auto info = client.Get("/world_info");
  REQUIRE(info);
  CHECK(info->status == 200);
  CHECK(json::parse(info->body)["identity"] == world.identity());

  const std::string body = frame_body().dump();
  auto first = client.Post("/frame", body, "application/json");
  auto second = client.Post("/frame", body, "application/json");
  REQUIRE(first);
  REQUIRE(second);
  CHECK(first->status == 200);
  CHECK(first->body == second->body);
  CHECK(first->has_header("X-Render-Ms"));
  const ServiceReply local = svc.handle("POST", "/frame", body);
  CHECK(local.body == first->body);

  auto bad = client.Post("/frame", "{}", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body).contains("error"));

  svc.stop();
  server.join();
}
