// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/decoder/field.hpp"
#include "terra/decoder/heightfield_oracle.hpp"
#include "terra/render/camera.hpp"
#include "terra/render/composite.hpp"
#include "terra/render/float_image.hpp"
#include "terra/render/renderer.hpp"

using namespace terra;

namespace {

// Weights from the running product of (1 - alpha), with no shared code.
std::vector<double> brute_force_weights(const std::vector<double>& sigma, const std::vector<double>& delta) {
  std::vector<double> w(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    double t = 1.0;
    for (std::size_t j = 0; j < i; ++j) t *= std::exp(-sigma[j] * delta[j]);
    w[i] = (1.0 - std::exp(-sigma[i] * delta[i])) * t;
  }
  return w;
}

// Opacity-drop penalty summed directly from its definition.
double brute_force_transparency(const std::vector<double>& alpha, const std::vector<double>& delta) {
  double loss = 0.0;
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    double t = 1.0;
    for (std::size_t j = 0; j < i; ++j) t *= 1.0 - alpha[j];
    loss += alpha[i] * t * std::max(alpha[i - 1] - alpha[i], 0.0) / delta[i];
  }
  return loss;
}

}  // namespace

TEST_CASE("compositing weights match the cumulative-product form") {
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(trial * 1000) * 200);
    std::vector<double> sigma(n), delta(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      sigma[i] = rng.uniform(trial * 1000 + 1 + 2 * i) < 0.3 ? 0.0 : 20.0 * rng.uniform(trial * 1000 + 2 + 2 * i);
      delta[i] = 0.01 + 0.2 * rng.uniform(trial * 777 + i);
    }
    compositing_weights(sigma, delta, w);
    const auto ref = brute_force_weights(sigma, delta);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(w[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1e-15));
      REQUIRE(w[i] >= 0.0);
      sum += w[i];
    }
    CHECK(sum <= 1.0 + 1e-12);
  }
}

TEST_CASE("half-opacity fixture composites to hand-computed values") {
  const double s = std::numbers::ln2;
  const std::vector<double> sigma{s, s}, delta{1.0, 1.0}, disparity{1.0, 0.5}, noise{2.0, -4.0};
  const std::vector<double> feats{1.0, 0.0, 0.0, 1.0};
  const RayComposite c = composite_ray(sigma, delta, disparity, feats, 2, noise);
  CHECK(c.mask == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(c.disparity == doctest::Approx(0.5 + 0.25 * 0.5).epsilon(1e-15));
  CHECK(c.noise == doctest::Approx(1.0 - 1.0).scale(1.0));
  CHECK(c.feature[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.feature[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("invalid densities raise numeric errors naming the ray") {
  std::vector<double> sigma{1.0, -1.0}, delta{1.0, 1.0}, w(2);
  try {
    compositing_weights(sigma, delta, w, 42);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numeric);
    CHECK(std::string(e.what()).find("ray 42") != std::string::npos);
  }
  sigma[1] = std::nan("");
  CHECK_THROWS_AS(compositing_weights(sigma, delta, w), Error);
}

TEST_CASE("transparency penalty: fixture, monotone rays and brute force") {
  const std::vector<double> alpha{0.5, 0.2, 0.2}, one{1.0, 1.0, 1.0};
  CHECK(std::abs(transparency_loss_from_alpha(alpha, one) - 0.03) <= 1e-9);

  CounterRng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(40), d(40, 0.1);
    for (int i = 0; i < 40; ++i) a[i] = rng.uniform(trial * 100 + i);
    std::sort(a.begin(), a.end());
    CHECK(transparency_loss_from_alpha(a, d) == 0.0);
    std::reverse(a.begin(), a.end());
    CHECK(transparency_loss_from_alpha(a, d) == doctest::Approx(brute_force_transparency(a, d)).epsilon(1e-12));
  }

  std::vector<double> sigma{3.0, 0.5, 2.0, 0.0, 1.0}, delta{0.2, 0.2, 0.3, 0.1, 0.2}, a2(5);
  for (int i = 0; i < 5; ++i) a2[i] = 1.0 - std::exp(-sigma[i] * delta[i]);
  CHECK(transparency_loss(sigma, delta) == doctest::Approx(brute_force_transparency(a2, delta)).epsilon(1e-12));
}

TEST_CASE("camera axes, rays and projection agree") {
  const Camera c0 = Camera::look({0, 1, 0}, 0.0, 0.0, 60.0, 64, 48);
  CHECK((c0.forward() - Vec3(0, 0, -1)).norm() < 1e-12);
  const Camera c1 = Camera::look({0, 1, 0}, std::numbers::pi / 2, 0.0);
  CHECK((c1.forward() - Vec3(-1, 0, 0)).norm() < 1e-12);
  const Camera c2 = Camera::look({0, 1, 0}, 0.0, 0.3);
  CHECK(c2.forward().y() == doctest::Approx(std::sin(0.3)));

  CHECK(c0.focal_pixels() == doctest::Approx(24.0 / std::tan(std::numbers::pi / 6)));
  const Vec3 center = c0.ray_direction(32.0, 24.0);
  CHECK((center - c0.forward()).norm() < 1e-12);
  const Vec3 top = c0.ray_direction(32.0, 0.0);
  CHECK(std::atan2(top.y(), -top.z()) == doctest::Approx(std::numbers::pi / 6));

  const Camera c = Camera::look({1, 2, 3}, 0.7, -0.4, 50.0, 40, 30);
  CounterRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const double px = 40 * rng.uniform(3 * i), py = 30 * rng.uniform(3 * i + 1), t = 1 + 10 * rng.uniform(3 * i + 2);
    const Vec3 p = c.position + t * c.ray_direction(px, py);
    double qx, qy, range;
    REQUIRE(c.project(p, qx, qy, range));
    CHECK(qx == doctest::Approx(px).epsilon(1e-9));
    CHECK(qy == doctest::Approx(py).epsilon(1e-9));
    CHECK(range == doctest::Approx(t).epsilon(1e-9));
  }
  double qx, qy, range;
  CHECK_FALSE(c.project(c.position - c.forward(), qx, qy, range));

  const auto rays = generate_rays(c);
  REQUIRE(rays.size() == 40u * 30u);
  CHECK((rays[5 * 40 + 7] - c.ray_direction(7.5, 5.5)).norm() < 1e-15);
}

TEST_CASE("sample spacing covers the bounds") {
  const RaySamples s = sample_ray(1.0, 16.0, 128);
  CHECK(s.t.front() == 1.0);
  CHECK(s.t.back() == 16.0);
  CHECK(s.delta == doctest::Approx(15.0 / 127.0));
  CHECK_THROWS_AS(sample_ray(2.0, 1.0, 10), Error);
  CHECK_THROWS_AS(sample_ray(1.0, 2.0, 1), Error);
}

TEST_CASE("flat terrain disparity matches the analytic plane hit") {
  const double base = -0.4;
  const HeightfieldOracle oracle = HeightfieldOracle::flat(base, 4, 0.3, 8);
  const RenderConfig cfg;
  const double delta = (cfg.far - cfg.near) / (cfg.samples - 1);
  CounterRng rng(14);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 origin(10 * rng.uniform(4 * i), 0.5 + rng.uniform(4 * i + 1), 10 * rng.uniform(4 * i + 2));
    const double az = 2 * std::numbers::pi * rng.uniform(4 * i + 3);
    const double el = -0.05 - 0.9 * rng.uniform(5000 + i);
    const Vec3 d(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
    const RayTrace tr = trace_ray(oracle, origin, d, cfg);
    const double t_hit = (origin.y() - base) / -d.y();
    if (t_hit < cfg.near || t_hit > cfg.far - 2 * delta) continue;
    const double truth = 1.0 / t_hit;
    CHECK(std::abs(tr.disparity - truth) <= 2.0 * delta * truth * truth);
    CHECK(tr.mask > 0.99);
    ++hits;
  }
  CHECK(hits > 100);
}

TEST_CASE("frame buffers agree with per-ray tracing") {
  const HeightfieldOracle oracle = HeightfieldOracle::hills(3, 4, 0.5, 6);
  const Camera cam = Camera::look({0.3, 1.0, 0.2}, 0.4, -0.2, 60.0, 12, 10);
  const RenderConfig cfg;
  const NoiseGrid noise(1);
  const RenderBuffers b = render_frame(oracle, cam, cfg, ProjectionP::select_rgb(6), noise);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) {
      const RayTrace tr = trace_ray(oracle, cam.position, cam.ray_direction(x + 0.5, y + 0.5), cfg);
      CHECK(b.disparity.at(x, y) == doctest::Approx(tr.disparity).epsilon(1e-6));
      CHECK(b.mask.at(x, y) == doctest::Approx(tr.mask).epsilon(1e-6));
      for (int c = 0; c < 3; ++c) CHECK(b.rgb.at(x, y, c) == b.feature.at(x, y, c));
    }
  CHECK(render_frame(oracle, cam, cfg, ProjectionP::select_rgb(6), noise) == b);
}

TEST_CASE("rays that leave the terrain carry no opacity, disparity or feature") {
  const HeightfieldOracle oracle = HeightfieldOracle::hills(5, 4, 0.5, 6);
  const Camera cam = Camera::look({0, 1.2, 0}, 1.0, 0.25, 60.0, 24, 24);
  const RenderBuffers b = render_frame(oracle, cam, {}, ProjectionP::seeded(6, 2), NoiseGrid(2));
  int sky = 0;
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      if (b.mask.at(x, y) >= 1e-6f) continue;
      ++sky;
      CHECK(b.disparity.at(x, y) < 1e-6f);
      double norm = 0.0;
      for (int c = 0; c < 6; ++c) norm += double(b.feature.at(x, y, c)) * b.feature.at(x, y, c);
      CHECK(std::sqrt(norm) < 1e-6);
      CHECK(b.noise.at(x, y) == 0.0f);
    }
  CHECK(sky > 50);
}

TEST_CASE("strict mode rejects samples outside a bounded field") {
  std::vector<float> f(4 * 4 * 32, 0.0f);
  auto grid = std::make_shared<const LayoutGrid>(4, 4, 32, f, 0.5);
  auto weights = std::make_shared<const DecoderWeights>(DecoderWeights::seeded({}, 1));
  const NeuralField field(grid, weights);
  const Camera cam = Camera::look({1, 0.5, 1}, 0.0, -0.3, 60.0, 4, 4);
  RenderConfig cfg;
  cfg.samples = 16;
  cfg.strict = true;
  try {
    render_frame(field, cam, cfg, ProjectionP::seeded(128, 1), NoiseGrid(1));
    FAIL("expected out_of_bounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_bounds);
  }
  cfg.strict = false;
  CHECK_NOTHROW(render_frame(field, cam, cfg, ProjectionP::seeded(128, 1), NoiseGrid(1)));
}

TEST_CASE("noise grid is a fixed bilinear lattice of unit Gaussians") {
  const NoiseGrid g(9, 0.15);
  const NoiseGrid g2(9, 0.15);
  double sum = 0.0, sq = 0.0;
  const int n = 200;
  for (int r = -n / 2; r < n / 2; ++r)
    for (int c = -n / 2; c < n / 2; ++c) {
      const double v = g.value(r, c);
      REQUIRE(v == g2.value(r, c));
      sum += v;
      sq += v * v;
      REQUIRE(g.sample((c + 0.5) * 0.15, (r + 0.5) * 0.15) == doctest::Approx(v).epsilon(1e-9).scale(1.0));
    }
  const double mean = sum / (n * n);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sq / (n * n) - mean * mean - 1.0) < 0.03);

  const double a = g.value(3, 7), b = g.value(3, 8), c = g.value(4, 7), d = g.value(4, 8);
  const double tx = 0.3, tz = 0.8;
  const double expect = (1 - tz) * ((1 - tx) * a + tx * b) + tz * ((1 - tx) * c + tx * d);
  CHECK(g.sample((7.5 + tx) * 0.15, (3.5 + tz) * 0.15) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(NoiseGrid(10).value(3, 7) != a);
}

TEST_CASE("frustum footprint bounds every sample position") {
  CounterRng rng(15);
  const RenderConfig cfg;
  const RaySamples rs = sample_ray(cfg.near, cfg.far, cfg.samples);
  for (int k = 0; k < 10; ++k) {
    const Camera cam = Camera::look({rng.uniform(k) * 5, 1.0, rng.uniform(k + 50) * 5}, 6.28 * rng.uniform(k + 100),
                                    -0.5 + rng.uniform(k + 150), 60.0, 16, 16);
    const auto box = frustum_footprint(cam, cfg);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const Vec3 d = cam.ray_direction(x + 0.5, y + 0.5);
        for (double t : {rs.t.front(), rs.t.back()}) {
          const Vec3 p = cam.position + t * d;
          REQUIRE(p.x() >= box[0]);
          REQUIRE(p.z() >= box[1]);
          REQUIRE(p.x() <= box[2]);
          REQUIRE(p.z() <= box[3]);
        }
      }
    CHECK(box[2] - box[0] <= 2 * cfg.far + 1e-9);
  }
}

TEST_CASE("supersampling box-filters a finer render") {
  const HeightfieldOracle oracle = HeightfieldOracle::hills(6, 4, 0.5, 6);
  const Camera cam = Camera::look({0, 1.0, 0}, 0.2, -0.1, 60.0, 8, 8);
  const RenderConfig cfg;
  const ProjectionP p = ProjectionP::select_rgb(6);
  const NoiseGrid noise(3);
  CHECK(supersample_render(oracle, cam, cfg, p, noise, 1) == render_frame(oracle, cam, cfg, p, noise));
  const RenderBuffers hi = render_frame(oracle, cam.with_resolution(16, 16), cfg, p, noise);
  const RenderBuffers ss = supersample_render(oracle, cam, cfg, p, noise, 2);
  REQUIRE(ss.width() == 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const double avg = (hi.mask.at(2 * x, 2 * y) + hi.mask.at(2 * x + 1, 2 * y) + hi.mask.at(2 * x, 2 * y + 1) +
                          hi.mask.at(2 * x + 1, 2 * y + 1)) /
                         4.0;
      CHECK(ss.mask.at(x, y) == doctest::Approx(avg).epsilon(1e-6));
    }
}

TEST_CASE("float buffers round-trip through the container") {
  FloatImage img(5, 3, 2);
  CounterRng(16).fill_gaussian(img.data, 1.0);
  const auto bytes = encode_float_image(img);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TFB1");
  CHECK(decode_float_image(bytes) == img);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_float_image(bad), Error);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
  try {
    decode_float_image(cut);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncated);
  }
}
