// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/metrics/disparity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "terra/common/error.hpp"

namespace terra {

double percentile(std::span<const double> sorted, double p) {
  require(!sorted.empty(), ErrorCode::argument, "percentile of an empty set");
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

FloatImage normalize_disparity(const FloatImage& raw, const FloatImage* mask, const DisparityNormalization& params) {
  require(raw.channels == 1, ErrorCode::argument, "disparity must have one channel");
  require(!mask || (mask->channels == 1 && mask->width == raw.width && mask->height == raw.height),
          ErrorCode::argument, "mask must match the disparity map");
  require(params.clip >= 0.0 && params.clip < 1.0 && params.scale > 0.0 && params.scale <= 1.0, ErrorCode::argument,
          "normalization needs 0 <= clip < 1 and 0 < scale <= 1");
  for (float v : raw.data)
    require(std::isfinite(v) && v >= 0.0f, ErrorCode::argument, "raw disparity must be finite and non-negative");

  auto is_sky = [&](std::size_t p) { return mask ? mask->data[p] < params.sky_threshold : raw.data[p] <= 0.0f; };
  std::vector<double> values;
  for (std::size_t p = 0; p < raw.pixel_count(); ++p)
    if (!is_sky(p)) values.push_back(raw.data[p]);
  FloatImage out(raw.width, raw.height, 1);
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double lo = percentile(values, params.low_percentile);
  const double hi = percentile(values, params.high_percentile);
  const bool degenerate = !(hi > lo);
  for (std::size_t p = 0; p < raw.pixel_count(); ++p) {
    if (is_sky(p)) continue;
    if (degenerate) {
      out.data[p] = 1.0f;
      continue;
    }
    const double n = std::max(std::clamp((raw.data[p] - lo) / (hi - lo), 0.0, 1.0), params.clip);
    out.data[p] = static_cast<float>(params.scale + (1.0 - params.scale) * (n - params.clip) / (1.0 - params.clip));
  }
  return out;
}

}  // namespace terra
