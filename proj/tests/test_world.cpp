// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>

#include "terra/common/error.hpp"
#include "terra/world/world.hpp"
#include "terra/world/world_file.hpp"

using namespace terra;

namespace {

WorldSpec small_spec(std::uint64_t seed, const std::string& refiner = "identity") {
  WorldSpec s = WorldSpec::from_seed(seed);
  s.generator = "small";
  s.refiner = refiner;
  s.render.far = 6.0;
  s.render.samples = 48;
  s.extend_margin = 2.0;
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

Camera test_camera(double x = 1.0, double yaw = 0.4) { return Camera::look({x, 1.0, 0.5}, yaw, -0.2, 60.0, 32, 32); }

}  // namespace

TEST_CASE("world spec defaults carry the pipeline constants") {
  const WorldSpec s;
  CHECK(s.render.near == 1.0);
  CHECK(s.render.far == 16.0);
  CHECK(s.render.samples == 128);
  CHECK(s.cell_width == 0.15);
  CHECK(s.generator_config().output_resolution == 256);
  CHECK(s.refine_factor == 8);
  CHECK(s.lr_width * s.refine_factor == 256);
}

TEST_CASE("world spec derives seeds and round-trips through JSON") {
  const WorldSpec a = WorldSpec::from_seed(5), b = WorldSpec::from_seed(5), c = WorldSpec::from_seed(6);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() != c.to_json());
  CHECK(a.decoder_seed != a.generator_seed);
  CHECK(a.noise_seed != a.sky_seed);
  WorldSpec odd = small_spec(9, "conv");
  odd.auto_extend = false;
  odd.sky_min_elevation = -5.0;
  const WorldSpec back = WorldSpec::from_json(nlohmann::json::parse(odd.to_json().dump()));
  CHECK(back.to_json() == odd.to_json());
  CHECK(back.render == odd.render);
  CHECK(back.decoder == odd.decoder);

  nlohmann::json future = odd.to_json();
  future["format_version"] = 99;
  CHECK(code_of([&] { WorldSpec::from_json(future); }) == ErrorCode::version);
  CHECK(WorldSpec::from_json(nlohmann::json::parse("{\"format_version\": 1}")).to_json() == WorldSpec().to_json());
  CHECK(code_of([&] { WorldSpec::from_json(nlohmann::json::parse("{\"world_seed\": \"abc\"}")); }) ==
        ErrorCode::configuration);
  WorldSpec bad = odd;
  bad.backend = "raytraced";
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::configuration);
  bad = odd;
  bad.lr_width = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("neural world renders deterministic, well-formed frames") {
  World w1(small_spec(3)), w2(small_spec(3));
  const FrameOutput a = w1.render(test_camera());
  const FrameOutput b = w2.render(test_camera());
  CHECK(a.full == b.full);
  CHECK(a.hr == b.hr);
  CHECK(a.lr.mask.width == 4);
  CHECK(a.full.width == 32);
  CHECK(a.dome.width == 32);
  const Frame f = a.frame();
  for (float v : f.rgb.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK(!a.extent.empty());
  CHECK(w1.identity() == w2.identity());
  CHECK(World(small_spec(4)).identity() != w1.identity());
  CHECK(code_of([&] { w1.render(test_camera().with_resolution(30, 32)); }) == ErrorCode::argument);
  CHECK(code_of([&] { w1.render(test_camera(), 0); }) == ErrorCode::argument);
}

TEST_CASE("frames are unchanged by later extension") {
  World w(small_spec(11));
  const FrameOutput before = w.render(test_camera());
  const ChunkRect ext = w.extent();
  w.extend(ext.grown(1));
  CHECK(w.extent() == ext.grown(1));
  const FrameOutput after = w.render(test_camera());
  CHECK(after.full == before.full);
  CHECK(after.hr.disparity == before.hr.disparity);
  w.render(test_camera(12.0, 2.0));
  CHECK(w.render(test_camera()).full == before.full);
}

TEST_CASE("auto-extend grows the layout ahead of the camera") {
  World w(small_spec(12));
  w.prepare(test_camera());
  const ChunkRect first = w.extent();
  w.prepare(test_camera());
  CHECK(w.extent() == first);
  w.prepare(test_camera(40.0));
  CHECK(w.extent().contains(first));
  CHECK(!(w.extent() == first));

  WorldSpec manual = small_spec(12);
  manual.auto_extend = false;
  World m(manual);
  m.prepare(test_camera());
  CHECK(m.extent().empty());
}

TEST_CASE("oracle worlds need no layout") {
  WorldSpec s = small_spec(1);
  s.backend = "oracle_flat";
  World w(s);
  REQUIRE(w.oracle() != nullptr);
  CHECK(w.extent().empty());
  CHECK(w.extend({0, 0, 2, 2}).empty());
  const FrameOutput out = w.render(test_camera());
  CHECK(out.lr.mask.data[out.lr.mask.pixel_count() - 1] > 0.99f);
  s.backend = "oracle_hills";
  CHECK(World(s).render(test_camera()).full.width == 32);
}

TEST_CASE("saved worlds reload and render bit-identically") {
  for (const std::string refiner : {"identity", "conv"}) {
    CAPTURE(refiner);
    World w(small_spec(21, refiner));
    const FrameOutput a = w.render(test_camera());
    for (bool layout : {false, true}) {
      CAPTURE(layout);
      const auto bytes = serialize_world(w, SaveOptions{layout});
      const auto loaded = parse_world(bytes);
      CHECK(loaded->digests() == w.digests());
      CHECK(loaded->identity() == w.identity());
      if (layout) CHECK(loaded->extent() == w.extent());
      const FrameOutput b = loaded->render(test_camera());
      CHECK(b.full == a.full);
      CHECK(b.hr == a.hr);
      CHECK(serialize_world(*loaded, SaveOptions{layout}) == bytes);
    }
  }
  const auto path = (std::filesystem::temp_directory_path() / "terra_test.world").string();
  World w(small_spec(22));
  save_world(w, path);
  CHECK(load_world(path)->identity() == w.identity());
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_world(path); }) == ErrorCode::io);
}

TEST_CASE("damaged world files fail with distinct error codes") {
  const auto bytes = serialize_world(World(small_spec(23)));
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(code_of([&] { parse_world(magic); }) == ErrorCode::configuration);
  auto version = bytes;
  version[8] = 2;
  try {
    parse_world(version);
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::version);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
  auto flipped = bytes;
  flipped.back() ^= 0x01;
  CHECK(code_of([&] { parse_world(flipped); }) == ErrorCode::digest);
  auto manifest = bytes;
  manifest[20] ^= 0x01;
  CHECK(code_of([&] { parse_world(manifest); }) == ErrorCode::digest);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 100);
  CHECK(code_of([&] { parse_world(cut); }) == ErrorCode::truncated);
  const std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 6);
  CHECK(code_of([&] { parse_world(tiny); }) == ErrorCode::truncated);
}
