// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/refine/refiner.hpp"

using namespace terra;

namespace {

RenderBuffers random_lr(int w, int h, int channels, std::uint64_t seed) {
  RenderBuffers b;
  b.feature = FloatImage(w, h, channels);
  b.rgb = FloatImage(w, h, 3);
  b.disparity = FloatImage(w, h, 1);
  b.mask = FloatImage(w, h, 1);
  b.noise = FloatImage(w, h, 1);
  b.transparency = FloatImage(w, h, 1);
  CounterRng rng(seed);
  rng.fill_gaussian(b.feature.data, 0.5);
  for (std::size_t i = 0; i < b.rgb.data.size(); ++i) b.rgb.data[i] = static_cast<float>(rng.uniform(1000 + i));
  for (std::size_t i = 0; i < b.mask.data.size(); ++i) {
    b.mask.data[i] = i % 5 == 0 ? 0.0f : 1.0f;
    b.disparity.data[i] = b.mask.data[i] * static_cast<float>(0.1 + 0.5 * rng.uniform(5000 + i));
  }
  CounterRng(seed + 1).fill_gaussian(b.noise.data, 1.0);
  return b;
}

}  // namespace

TEST_CASE("identity refiner bilinearly upsamples rgb, disparity and mask") {
  RenderBuffers lr = random_lr(4, 3, 6, 1);
  for (std::size_t i = 0; i < lr.mask.data.size(); ++i) lr.disparity.data[i] = 0.25f;
  const IdentityRefiner r(8);
  const RefinedBuffers hr = r.refine(lr);
  CHECK(hr.rgb.width == 32);
  CHECK(hr.rgb.height == 24);
  for (float v : hr.disparity.data) CHECK(v == doctest::Approx(0.25f));
  CHECK(hr.rgb == resize_bilinear(lr.rgb, 32, 24));
  CHECK(hr.mask == resize_bilinear(lr.mask, 32, 24));
  const RefinementLosses loss = refinement_losses(lr, hr);
  CHECK(loss.consistency == 0.0);
}

TEST_CASE("conv refiner output shape, ranges and determinism") {
  const ConvRefiner r = ConvRefiner::seeded(6, 3);
  CHECK(r.factor() == 8);
  CHECK(r.kind() == "conv");
  const RenderBuffers lr = random_lr(5, 4, 6, 2);
  const RefinedBuffers a = r.refine(lr);
  CHECK(a.rgb.width == 40);
  CHECK(a.rgb.height == 32);
  for (float v : a.disparity.data) CHECK(v >= 0.0f);
  for (float v : a.mask.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK(r.refine(lr) == a);
  CHECK(!(ConvRefiner::seeded(6, 4).refine(lr) == a));
}

TEST_CASE("conv refiner stays close to its upsampled skip path") {
  const ConvRefiner r = ConvRefiner::seeded(6, 5);
  const RenderBuffers lr = random_lr(6, 6, 6, 3);
  const RefinedBuffers hr = r.refine(lr);
  const RefinementLosses loss = refinement_losses(lr, hr);
  CHECK(loss.consistency < 0.2);
}

TEST_CASE("projected noise reaches the refiner output") {
  const ConvRefiner r = ConvRefiner::seeded(6, 6);
  RenderBuffers lr = random_lr(4, 4, 6, 4);
  const RefinedBuffers a = r.refine(lr);
  for (float& v : lr.noise.data) v = -v;
  CHECK(!(r.refine(lr) == a));
}

TEST_CASE("conv refiner weights round-trip through the container") {
  const ConvRefiner r = ConvRefiner::seeded(6, 7);
  const WeightContainer c = WeightContainer::parse(r.to_container().serialize());
  const ConvRefiner back = ConvRefiner::from_container(c);
  CHECK(back.feature_channels() == 6);
  REQUIRE(back.stages().size() == r.stages().size());
  for (std::size_t i = 0; i < r.stages().size(); ++i) {
    CHECK(back.stages()[i].in == r.stages()[i].in);
    CHECK(back.stages()[i].out == r.stages()[i].out);
  }
  const RenderBuffers lr = random_lr(3, 3, 6, 5);
  CHECK(back.refine(lr) == r.refine(lr));

  WeightContainer wrong = c;
  wrong.kind = "decoder";
  CHECK_THROWS_AS(ConvRefiner::from_container(wrong), Error);
}

TEST_CASE("conv refiner rejects mismatched inputs") {
  const ConvRefiner r = ConvRefiner::seeded(6, 8);
  CHECK_THROWS_AS(r.refine(random_lr(3, 3, 5, 6)), Error);
  RenderBuffers lr = random_lr(3, 3, 6, 6);
  lr.disparity = FloatImage(2, 3, 1);
  CHECK_THROWS_AS(r.refine(lr), Error);
  CHECK_THROWS_AS(ConvRefiner::seeded(6, 1, 4), Error);
  CHECK_THROWS_AS(IdentityRefiner(0), Error);
}

TEST_CASE("noise injection adds a scaled, resized noise image per channel") {
  FloatImage act(4, 4, 2, 1.0f);
  FloatImage noise(2, 2, 1);
  noise.data = {1.0f, 2.0f, 3.0f, 4.0f};
  const float scales[2] = {0.5f, -1.0f};
  inject_noise(act, noise, scales);
  const FloatImage up = resize_bilinear(noise, 4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      CHECK(act.at(x, y, 0) == doctest::Approx(1.0f + 0.5f * up.at(x, y)));
      CHECK(act.at(x, y, 1) == doctest::Approx(1.0f - up.at(x, y)));
    }
  const float one[1] = {1.0f};
  CHECK_THROWS_AS(inject_noise(act, noise, one), Error);
}

TEST_CASE("sky loss penalizes dark opaque pixels") {
  RenderBuffers lr = random_lr(2, 2, 3, 9);
  RefinedBuffers hr{FloatImage(2, 2, 3, 0.0f), FloatImage(2, 2, 1, 0.0f), FloatImage(2, 2, 1, 1.0f)};
  CHECK(refinement_losses(lr, hr).sky == doctest::Approx(1.0));
  hr.rgb = FloatImage(2, 2, 3, 0.5f);
  CHECK(refinement_losses(lr, hr).sky == doctest::Approx(std::exp(-30.0)));
  hr.rgb = FloatImage(2, 2, 3, 0.0f);
  hr.mask = FloatImage(2, 2, 1, 0.0f);
  CHECK(refinement_losses(lr, hr).sky == 0.0);
}
