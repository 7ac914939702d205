// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "terra/common/error.hpp"
#include "terra/metrics/consistency.hpp"
#include "terra/metrics/disparity.hpp"
#include "terra/render/float_image.hpp"
#include "terra/traj/trajectory.hpp"
#include "terra/world/frame_service.hpp"
#include "terra/world/world_file.hpp"

namespace fs = std::filesystem;
using namespace terra;

namespace {

enum class Level { quiet = 0, info = 1, debug = 2 };

Level log_level() {
  const char* v = std::getenv("TERRA_LOG");
  if (!v) return Level::info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Level::quiet;
  if (s == "debug" || s == "2") return Level::debug;
  return Level::info;
}

void log(Level level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << "[terra] " << msg << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::pair<int, int> parse_resolution(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::logic_error&) {
    fail(ErrorCode::argument, "resolution must look like 256 or 256x192, got '" + s + "'");
  }
}

std::string numbered(const fs::path& dir, std::size_t i, const std::string& suffix) {
  char name[64];
  std::snprintf(name, sizeof name, "frame_%04zu%s", i, suffix.c_str());
  return (dir / name).string();
}

struct Options {
  std::uint64_t seed = 7;
  std::string world_path;
  std::string traj = "forward";
  int steps = -1;
  double step_len = kDefaultStepLength;
  std::string res = "256";
  int supersample = 1;
  std::string backend;
  std::string layers = "full";
  std::string metrics;
  std::string out;
  std::string serve;
  std::string save_world;
  bool save_layout = false;
  std::string oracle;
  std::string generator = "standard";
  double height = 1.2;
  double pitch = -0.15;
  double radius = 1.0;
};

std::unique_ptr<World> make_world(const Options& o) {
  if (!o.world_path.empty()) {
    require(o.backend.empty() && o.oracle.empty(), ErrorCode::argument,
            "--backend and --oracle cannot override a loaded world");
    log(Level::info, "loading world " + o.world_path);
    return load_world(o.world_path);
  }
  WorldSpec spec = WorldSpec::from_seed(o.seed);
  spec.generator = o.generator;
  WorldAssets assets;
  if (!o.oracle.empty()) {
    require(o.oracle == "flat" || o.oracle == "hills", ErrorCode::argument, "--oracle must be flat or hills");
    spec.backend = "oracle_" + o.oracle;
  }
  if (!o.backend.empty()) {
    if (o.backend.rfind("file=", 0) == 0) {
      spec.refiner = "file";
      assets.refiner = WeightContainer::load(o.backend.substr(5));
    } else {
      require(o.backend == "identity" || o.backend == "conv", ErrorCode::argument,
              "--backend must be identity, conv or file=PATH");
      spec.refiner = o.backend;
    }
  }
  return std::make_unique<World>(spec, std::move(assets));
}

Trajectory make_trajectory(const Options& o, int width, int height, bool res_given) {
  const Camera start = Camera::look(Vec3(0.0, o.height, 0.0), 0.0, o.pitch, 60.0, width, height);
  if (o.traj == "forward") return forward_trajectory(start, o.steps < 0 ? kDefaultSteps : o.steps, o.step_len);
  if (o.traj == "cyclic" || o.traj == "orbit") {
    const int frames = o.steps < 0 ? 24 : o.steps;
    require(frames >= 1, ErrorCode::argument, "--steps must be positive for circular trajectories");
    return o.traj == "cyclic" ? cyclic_trajectory(start, start.position, o.radius, frames, true, o.pitch)
                              : orbit_trajectory(start, start.position, o.radius, frames, o.pitch);
  }
  if (o.traj.rfind("file=", 0) == 0) {
    Trajectory t = load_trajectory(o.traj.substr(5));
    if (res_given)
      for (Camera& c : t.poses) c = c.with_resolution(width, height);
    return t;
  }
  fail(ErrorCode::argument, "--traj must be forward, cyclic, orbit or file=PATH");
}

void write_layers(const fs::path& dir, std::size_t i, const FrameOutput& f, const std::vector<std::string>& layers) {
  for (const auto& layer : layers) {
    if (layer == "full") {
      write_image(numbered(dir, i, ".png"), to_bytes(f.frame().rgb));
    } else if (layer == "rgb_lr") {
      write_image(numbered(dir, i, "_rgb_lr.png"), to_bytes(f.lr.rgb));
    } else if (layer == "dome") {
      write_image(numbered(dir, i, "_dome.png"), to_bytes(f.dome));
    } else if (layer == "disparity") {
      write_float_image(numbered(dir, i, "_disparity.tfb"), f.hr.disparity);
      write_image(numbered(dir, i, "_disparity.png"), to_bytes(normalize_disparity(f.hr.disparity, &f.hr.mask)));
    } else if (layer == "mask") {
      write_float_image(numbered(dir, i, "_mask.tfb"), f.hr.mask);
    } else if (layer == "noise") {
      write_float_image(numbered(dir, i, "_noise.tfb"), f.lr.noise);
    }
  }
}

double mean_of(const FloatImage& img) {
  double s = 0.0;
  for (float v : img.data) s += v;
  return img.data.empty() ? 0.0 : s / static_cast<double>(img.data.size());
}

int run(const Options& o, const std::string& res_flag_used) {
  auto world = make_world(o);
  if (!o.save_world.empty()) {
    SaveOptions so;
    so.include_layout = o.save_layout;
    save_world(*world, o.save_world, so);
    log(Level::info, "saved world to " + o.save_world);
  }

  if (!o.serve.empty()) {
    const auto [host, port] = parse_bind_address(o.serve);
    FrameService service(*world);
    log(Level::info, "serving world " + world->identity().substr(0, 16) + " on " + host + ":" + std::to_string(port));
    service.serve(host, port);
    return 0;
  }
  if (o.out.empty()) {
    require(!o.save_world.empty(), ErrorCode::argument, "nothing to do: pass --out, --serve or --save-world");
    return 0;
  }

  const auto [width, height] = parse_resolution(o.res);
  require(o.supersample >= 1, ErrorCode::argument, "--supersample must be at least 1");
  const std::vector<std::string> layers = split_list(o.layers);
  for (const auto& l : layers)
    require(std::find(frame_layers().begin(), frame_layers().end(), l) != frame_layers().end(), ErrorCode::argument,
            "unknown layer '" + l + "'");
  const std::vector<std::string> metrics = split_list(o.metrics);
  for (const auto& m : metrics)
    require(m == "onestep" || m == "cycle" || m == "transparency", ErrorCode::argument,
            "unknown metric '" + m + "' (onestep, cycle, transparency)");
  auto wants = [&](const char* m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };

  const Trajectory traj = make_trajectory(o, width, height, !res_flag_used.empty());
  require(!traj.poses.empty(), ErrorCode::argument, "trajectory has no poses");
  std::error_code ec;
  fs::create_directories(o.out, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + o.out + ": " + ec.message());
  const fs::path dir(o.out);
  save_trajectory((dir / "trajectory.txt").string(), traj);

  FrameRenderer render = world->frame_renderer(o.supersample);
  std::ofstream jsonl;
  if (!metrics.empty()) {
    jsonl.open(dir / "metrics.jsonl");
    require(jsonl.good(), ErrorCode::io, "cannot write metrics.jsonl in " + o.out);
  }

  std::array<double, 3> color_sum{}, color_sq{};
  double color_count = 0.0;
  nlohmann::json sums = nlohmann::json::object();
  std::vector<std::size_t> counts(3, 0);
  Frame previous;
  for (std::size_t i = 0; i < traj.poses.size(); ++i) {
    const Camera& pose = traj.poses[i];
    const FrameOutput out = world->render(pose, o.supersample);
    write_layers(dir, i, out, layers);
    const Frame frame = out.frame();
    for (std::size_t p = 0; p < frame.rgb.pixel_count(); ++p)
      for (int c = 0; c < 3; ++c) {
        const double v = frame.rgb.data[p * 3 + c];
        color_sum[c] += v;
        color_sq[c] += v * v;
      }
    color_count += static_cast<double>(frame.rgb.pixel_count());

    nlohmann::json rec{{"pose", i}};
    if (wants("onestep") && i > 0) {
      // Warp this frame back to the previous pose using that pose's depth.
      WarpOptions wo;
      wo.source_disparity = &frame.disparity;
      const WarpResult wr = backward_warp(frame.rgb, pose, previous.disparity, &previous.mask, traj.poses[i - 1], wo);
      const ConsistencyResult r = l1_x100(wr.rgb, previous.rgb, &wr.valid);
      rec["onestep_from_previous"] = r.value;
      rec["onestep_valid_fraction"] = r.valid_fraction;
    }
    if (wants("cycle")) {
      const Camera& next = i + 1 < traj.poses.size() ? traj.poses[i + 1] : traj.poses[i > 0 ? i - 1 : 0];
      const ConsistencyResult r = cycle_consistency(render, pose, next);
      rec["cycle"] = r.value;
      char line[64];
      std::snprintf(line, sizeof line, "pose %zu cycle %.2f", i, r.value);
      std::cout << line << "\n";
    }
    if (wants("transparency")) rec["transparency"] = mean_of(out.lr.transparency);
    if (!metrics.empty()) {
      for (const char* key : {"onestep_from_previous", "cycle", "transparency"})
        if (rec.contains(key)) sums[key] = sums.value(key, 0.0) + rec[key].get<double>();
      jsonl << rec.dump() << "\n";
    }
    log(Level::debug, "pose " + std::to_string(i) + " done");
    previous = frame;
  }

  nlohmann::json summary;
  summary["world_identity"] = world->identity();
  summary["poses"] = traj.poses.size();
  summary["trajectory"] = to_string(traj.kind);
  summary["step_len"] = traj.step_len;
  std::vector<double> mean(3), var(3);
  for (int c = 0; c < 3; ++c) {
    mean[c] = color_sum[c] / color_count;
    var[c] = color_sq[c] / color_count - mean[c] * mean[c];
  }
  summary["color_stats_not_fid"] = {{"mean", mean}, {"variance", var}};
  const double n = static_cast<double>(traj.poses.size());
  if (sums.contains("onestep_from_previous") && n > 1)
    summary["mean_onestep"] = sums["onestep_from_previous"].get<double>() / (n - 1);
  if (sums.contains("cycle")) summary["mean_cycle"] = sums["cycle"].get<double>() / n;
  if (sums.contains("transparency")) summary["mean_transparency"] = sums["transparency"].get<double>() / n;
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
  log(Level::info, "wrote " + std::to_string(traj.poses.size()) + " frames to " + o.out);
  return 0;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::io:
      return 3;
    case ErrorCode::internal:
    case ErrorCode::numeric:
      return 4;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Render, measure and serve persistent 3D landscapes."};
  Options o;
  app.add_option("--seed", o.seed, "World seed");
  app.add_option("--world", o.world_path, "Load a world file instead of building from --seed");
  app.add_option("--traj", o.traj, "forward | cyclic | orbit | file=PATH");
  app.add_option("--steps", o.steps, "Forward steps (default 100) or circle frames (default 24)");
  app.add_option("--step-len", o.step_len, "Forward step length in world units");
  auto* res = app.add_option("--res", o.res, "Output resolution, N or WxH (multiple of the refine factor)");
  app.add_option("--supersample", o.supersample, "Ray supersampling factor for the low-resolution render");
  app.add_option("--backend", o.backend, "Refiner: identity | conv | file=PATH");
  app.add_option("--layers", o.layers, "Comma list of full,rgb_lr,disparity,mask,noise,dome");
  app.add_option("--metrics", o.metrics, "Comma list of onestep,cycle,transparency");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--serve", o.serve, "Serve frames on HOST:PORT");
  app.add_option("--save-world", o.save_world, "Write the world to this file");
  app.add_flag("--save-layout", o.save_layout, "Embed materialized layout chunks when saving");
  app.add_option("--oracle", o.oracle, "Analytic terrain instead of the neural field: flat | hills");
  app.add_option("--generator", o.generator, "Layout generator: standard | small");
  app.add_option("--height", o.height, "Start camera height");
  app.add_option("--pitch", o.pitch, "Start camera pitch in radians");
  app.add_option("--radius", o.radius, "Circle radius for cyclic and orbit trajectories");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return run(o, res->count() ? o.res : std::string());
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
