// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/metrics/consistency.hpp"

#include <cmath>

#include "terra/common/error.hpp"

namespace terra {

ConsistencyResult l1_x100(const FloatImage& a, const FloatImage& b, const FloatImage* valid) {
  require(a.same_shape(b), ErrorCode::configuration, "L1 inputs differ in shape");
  require(!valid || (valid->width == a.width && valid->height == a.height && valid->channels == 1),
          ErrorCode::configuration, "validity mask does not match the images");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if (valid && valid->data[p] == 0.0f) continue;
    ++count;
    for (int c = 0; c < a.channels; ++c) {
      const std::size_t k = p * a.channels + c;
      sum += std::abs(static_cast<double>(a.data[k]) - static_cast<double>(b.data[k]));
    }
  }
  ConsistencyResult r;
  r.valid_fraction = a.pixel_count() ? static_cast<double>(count) / static_cast<double>(a.pixel_count()) : 0.0;
  r.value = count ? 100.0 * sum / static_cast<double>(count * a.channels) : 0.0;
  return r;
}

ConsistencyResult one_step_consistency(const FrameRenderer& render, const Camera& pose, const Camera& next,
                                       const DisparitySource* depth) {
  const Frame a = render(pose);
  const Frame b = render(next);
  const FloatImage target_disparity = depth ? (*depth)(pose) : a.disparity;
  WarpOptions opt;
  opt.source_disparity = depth ? nullptr : &b.disparity;
  const WarpResult w = backward_warp(b.rgb, next, target_disparity, &a.mask, pose, opt);
  return l1_x100(w.rgb, a.rgb, &w.valid);
}

ConsistencyResult cycle_consistency(const FrameRenderer& render, const Camera& pose, const Camera& next,
                                    const std::function<void()>& between) {
  const Frame first = render(pose);
  if (between) between();
  render(next);
  const Frame last = render(pose);
  return l1_x100(first.rgb, last.rgb);
}

}  // namespace terra
