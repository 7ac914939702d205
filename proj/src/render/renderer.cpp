// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/render/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"

namespace terra {
namespace {

constexpr std::int64_t kNoiseTag = 5100;
constexpr std::int64_t kProjectionTag = 5200;
constexpr int kTile = 4;
constexpr int kChunk = 16;

// Per-ray compositing state.
struct RayState {
  double optical = 0.0;
  double mask = 0.0;
  double disparity = 0.0;
  double noise = 0.0;
  double transparency = 0.0;
  double prev_alpha = 0.0;
  int next = 0;
  bool alive = true;
};

void check_config(const RenderConfig& c) {
  require(std::isfinite(c.near) && std::isfinite(c.far) && c.near > 0.0 && c.near < c.far, ErrorCode::argument,
          "render bounds need 0 < near < far");
  require(c.samples >= 2, ErrorCode::argument, "need at least 2 samples per ray");
  require(c.termination >= 0.0 && c.termination < 1.0, ErrorCode::argument, "termination must lie in [0, 1)");
}

struct Sample {
  std::size_t ray;
  int index;
  double x;
  double z;
  std::int64_t slot;  // row in the decode batch, -1 when above the field's empty height
};

// Folds one decoded sample into the ray. Returns the sample's weight.
double accumulate(RayState& s, double sigma, double t, double delta, std::int64_t ray, int index,
                  const NoiseGrid* noise, double x, double z) {
  if (!std::isfinite(sigma) || sigma < 0.0)
    fail(ErrorCode::numeric, "ray " + std::to_string(ray) + " sample " + std::to_string(index) +
                                 ": density must be finite and non-negative, got " + std::to_string(sigma));
  const double tau = sigma * delta;
  const double alpha = -std::expm1(-tau);
  const double w = alpha * std::exp(-s.optical);
  s.optical += tau;
  s.mask += w;
  s.disparity += w / t;
  if (index > 0) s.transparency += w * std::max(s.prev_alpha - alpha, 0.0) / delta;
  s.prev_alpha = alpha;
  if (noise && w > 0.0) s.noise += w * noise->sample(x, z);
  return w;
}

}  // namespace

NoiseGrid::NoiseGrid(std::uint64_t seed, double cell_width)
    : seed_(seed), key_(CounterRng::derive(seed, {kNoiseTag})), cell_width_(cell_width) {
  require(cell_width > 0.0 && std::isfinite(cell_width), ErrorCode::configuration, "noise cell width must be positive");
}

double NoiseGrid::value(std::int64_t row, std::int64_t col) const {
  return CounterRng(CounterRng::derive(key_, {row, col})).gaussian(0);
}

double NoiseGrid::sample(double x, double z) const {
  const double fx = x / cell_width_ - 0.5;
  const double fz = z / cell_width_ - 0.5;
  const double c0 = std::floor(fx);
  const double r0 = std::floor(fz);
  const double tx = fx - c0;
  const double tz = fz - r0;
  const auto c = static_cast<std::int64_t>(c0);
  const auto r = static_cast<std::int64_t>(r0);
  return (1.0 - tz) * ((1.0 - tx) * value(r, c) + tx * value(r, c + 1)) +
         tz * ((1.0 - tx) * value(r + 1, c) + tx * value(r + 1, c + 1));
}

ProjectionP ProjectionP::seeded(int channels, std::uint64_t seed) {
  require(channels >= 1, ErrorCode::configuration, "projection needs at least one channel");
  ProjectionP p;
  p.channels = channels;
  p.matrix.resize(static_cast<std::size_t>(3) * channels);
  CounterRng(CounterRng::derive(seed, {kProjectionTag})).fill_gaussian(p.matrix, 0.5 / std::sqrt(channels));
  p.offset = {0.45f, 0.48f, 0.40f};
  return p;
}

ProjectionP ProjectionP::select_rgb(int channels) {
  require(channels >= 3, ErrorCode::configuration, "rgb selection needs at least three channels");
  ProjectionP p;
  p.channels = channels;
  p.matrix.assign(static_cast<std::size_t>(3) * channels, 0.0f);
  for (int c = 0; c < 3; ++c) p.matrix[static_cast<std::size_t>(c) * channels + c] = 1.0f;
  return p;
}

FloatImage project_rgb(const FloatImage& phi, const ProjectionP& p) {
  require(phi.channels == p.channels, ErrorCode::configuration,
          "projection expects " + std::to_string(p.channels) + " channels, image has " + std::to_string(phi.channels));
  FloatImage out(phi.width, phi.height, 3);
  for (std::size_t i = 0; i < phi.pixel_count(); ++i) {
    const float* f = phi.data.data() + i * phi.channels;
    for (int c = 0; c < 3; ++c) {
      double acc = p.offset[c];
      const float* row = p.matrix.data() + static_cast<std::size_t>(c) * p.channels;
      for (int k = 0; k < p.channels; ++k) acc += static_cast<double>(row[k]) * f[k];
      out.data[i * 3 + c] = static_cast<float>(acc);
    }
  }
  return out;
}

RayTrace trace_ray(const RadianceField& field, const Vec3& origin, const Vec3& direction, const RenderConfig& config) {
  check_config(config);
  const RaySamples rs = sample_ray(config.near, config.far, config.samples);
  RayTrace out;
  out.t = rs.t;
  out.sigma.assign(rs.t.size(), 0.0);
  out.weight.assign(rs.t.size(), 0.0);
  std::vector<float> color(static_cast<std::size_t>(field.color_channels()));
  RayState s;
  for (std::size_t i = 0; i < rs.t.size(); ++i) {
    const Vec3 p = origin + rs.t[i] * direction;
    float sigma = 0.0f;
    std::uint8_t covered = 1;
    if (p.y() <= field.empty_above()) field.decode(1, p.data(), color.data(), &sigma, &covered);
    if (!covered && config.strict)
      fail(ErrorCode::out_of_bounds, "sample " + std::to_string(i) + " lies outside the materialized layout");
    out.sigma[i] = sigma;
    out.weight[i] = accumulate(s, sigma, rs.t[i], rs.delta, 0, static_cast<int>(i), nullptr, 0, 0);
    if (std::exp(-s.optical) < config.termination) break;
  }
  out.mask = s.mask;
  out.disparity = s.disparity;
  return out;
}

RenderBuffers render_frame(const RadianceField& field, const Camera& camera, const RenderConfig& config,
                           const ProjectionP& projection, const NoiseGrid& noise) {
  camera.validate();
  check_config(config);
  const int w = camera.width;
  const int h = camera.height;
  const int channels = field.color_channels();
  require(projection.channels == channels, ErrorCode::configuration,
          "projection expects " + std::to_string(projection.channels) + " channels, field produces " +
              std::to_string(channels));
  const RaySamples rs = sample_ray(config.near, config.far, config.samples);
  const int n = config.samples;
  const std::vector<Vec3> dirs = generate_rays(camera);

  RenderBuffers out;
  out.feature = FloatImage(w, h, channels);
  out.disparity = FloatImage(w, h, 1);
  out.mask = FloatImage(w, h, 1);
  out.noise = FloatImage(w, h, 1);
  out.transparency = FloatImage(w, h, 1);

  const int tiles_x = (w + kTile - 1) / kTile;
  const int tiles_y = (h + kTile - 1) / kTile;
  parallel_for(static_cast<std::size_t>(tiles_x) * tiles_y, [&](std::size_t tile) {
    const int tx = static_cast<int>(tile % tiles_x) * kTile;
    const int ty = static_cast<int>(tile / tiles_x) * kTile;
    std::vector<std::int64_t> pixels;
    for (int y = ty; y < std::min(h, ty + kTile); ++y)
      for (int x = tx; x < std::min(w, tx + kTile); ++x) pixels.push_back(static_cast<std::int64_t>(y) * w + x);
    const std::size_t rays = pixels.size();
    std::vector<RayState> state(rays);
    std::vector<double> feature(rays * channels, 0.0);
    std::vector<double> xyz;
    std::vector<float> color, sigma;
    std::vector<std::uint8_t> covered;
    std::vector<Sample> samples;
    const double empty_above = field.empty_above();

    for (;;) {
      xyz.clear();
      samples.clear();
      for (std::size_t r = 0; r < rays; ++r) {
        if (!state[r].alive) continue;
        const Vec3& d = dirs[pixels[r]];
        const int end = std::min(n, state[r].next + kChunk);
        for (int i = state[r].next; i < end; ++i) {
          const Vec3 p = camera.position + rs.t[i] * d;
          Sample smp{r, i, p.x(), p.z(), -1};
          if (p.y() <= empty_above) {
            smp.slot = static_cast<std::int64_t>(xyz.size() / 3);
            xyz.insert(xyz.end(), {p.x(), p.y(), p.z()});
          }
          samples.push_back(smp);
        }
      }
      if (samples.empty()) break;
      const std::size_t decoded = xyz.size() / 3;
      color.resize(decoded * channels);
      sigma.resize(decoded);
      covered.resize(decoded);
      if (decoded > 0) field.decode(decoded, xyz.data(), color.data(), sigma.data(), covered.data());

      for (const Sample& smp : samples) {
        const std::size_t r = smp.ray;
        const int i = smp.index;
        RayState& s = state[r];
        if (!s.alive) continue;
        const auto k = static_cast<std::size_t>(smp.slot);
        if (smp.slot >= 0 && !covered[k] && config.strict)
          fail(ErrorCode::out_of_bounds, "ray " + std::to_string(pixels[r]) + " sample " + std::to_string(i) +
                                             " at (" + std::to_string(smp.x) + ", " + std::to_string(smp.z) +
                                             ") lies outside the materialized layout");
        const double sg = smp.slot >= 0 ? sigma[k] : 0.0;
        const double wt = accumulate(s, sg, rs.t[i], rs.delta, pixels[r], i, &noise, smp.x, smp.z);
        if (wt > 0.0) {
          double* f = feature.data() + r * channels;
          const float* c = color.data() + k * channels;
          for (int ch = 0; ch < channels; ++ch) f[ch] += wt * c[ch];
        }
        s.next = i + 1;
        if (s.next >= n || std::exp(-s.optical) < config.termination) s.alive = false;
      }
    }

    for (std::size_t r = 0; r < rays; ++r) {
      const auto p = static_cast<std::size_t>(pixels[r]);
      out.mask.data[p] = static_cast<float>(state[r].mask);
      out.disparity.data[p] = static_cast<float>(state[r].disparity);
      out.noise.data[p] = static_cast<float>(state[r].noise);
      out.transparency.data[p] = static_cast<float>(state[r].transparency);
      for (int ch = 0; ch < channels; ++ch)
        out.feature.data[p * channels + ch] = static_cast<float>(feature[r * channels + ch]);
    }
  });
  out.rgb = project_rgb(out.feature, projection);
  return out;
}

RenderBuffers supersample_render(const RadianceField& field, const Camera& camera, const RenderConfig& config,
                                 const ProjectionP& projection, const NoiseGrid& noise, int factor) {
  require(factor >= 1, ErrorCode::argument, "supersample factor must be at least 1");
  if (factor == 1) return render_frame(field, camera, config, projection, noise);
  RenderBuffers hi =
      render_frame(field, camera.with_resolution(camera.width * factor, camera.height * factor), config, projection, noise);
  RenderBuffers out;
  out.feature = downsample_box(hi.feature, factor);
  out.rgb = downsample_box(hi.rgb, factor);
  out.disparity = downsample_box(hi.disparity, factor);
  out.mask = downsample_box(hi.mask, factor);
  out.noise = downsample_box(hi.noise, factor);
  out.transparency = downsample_box(hi.transparency, factor);
  return out;
}

std::array<double, 4> frustum_footprint(const Camera& camera, const RenderConfig& config) {
  camera.validate();
  std::array<double, 4> box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto add = [&](const Vec3& p) {
    box[0] = std::min(box[0], p.x());
    box[1] = std::min(box[1], p.z());
    box[2] = std::max(box[2], p.x());
    box[3] = std::max(box[3], p.z());
  };
  add(camera.position);
  // Samples lie within distance `far` along rays of the pixel cone. Far points
  // on a dense direction grid, padded by the sagitta between grid rays, bound
  // the spherical cap.
  constexpr int kSteps = 32;
  double max_step = 0.0;
  for (int j = 0; j <= kSteps; ++j)
    for (int i = 0; i <= kSteps; ++i) {
      const Vec3 d = camera.ray_direction(camera.width * i / double(kSteps), camera.height * j / double(kSteps));
      add(camera.position + config.far * d);
      if (i > 0) {
        const Vec3 prev =
            camera.ray_direction(camera.width * (i - 1) / double(kSteps), camera.height * j / double(kSteps));
        max_step = std::max(max_step, std::acos(std::clamp(d.dot(prev), -1.0, 1.0)));
      }
    }
  const double pad = config.far * (1.0 - std::cos(max_step)) + 1e-9;
  box[0] -= pad;
  box[1] -= pad;
  box[2] += pad;
  box[3] += pad;
  return box;
}

}  // namespace terra
