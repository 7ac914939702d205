// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/metrics/warp.hpp"

#include <cmath>

#include "terra/common/error.hpp"

namespace terra {

WarpResult backward_warp(const FloatImage& source_rgb, const Camera& source, const FloatImage& target_disparity,
                         const FloatImage* target_mask, const Camera& target, const WarpOptions& options) {
  require(target_disparity.channels == 1, ErrorCode::configuration, "target disparity must have one channel");
  require(!target_mask || (target_mask->channels == 1 && target_mask->width == target_disparity.width &&
                           target_mask->height == target_disparity.height),
          ErrorCode::configuration, "target mask must match the target disparity");
  const FloatImage* sd = options.source_disparity;
  require(!sd || (sd->channels == 1 && sd->width == source_rgb.width && sd->height == source_rgb.height),
          ErrorCode::configuration, "source disparity must match the source image");
  const Camera src = source.with_resolution(source_rgb.width, source_rgb.height);
  const Camera dst = target.with_resolution(target_disparity.width, target_disparity.height);
  src.validate();
  dst.validate();

  WarpResult out{FloatImage(dst.width, dst.height, source_rgb.channels), FloatImage(dst.width, dst.height, 1)};
  for (int j = 0; j < dst.height; ++j)
    for (int i = 0; i < dst.width; ++i) {
      const double d = target_disparity.at(i, j);
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      if (target_mask && target_mask->at(i, j) < options.sky_threshold) continue;
      const Vec3 p = dst.position + dst.ray_direction(i + 0.5, j + 0.5) / d;
      double px = 0.0, py = 0.0, range = 0.0;
      if (!src.project(p, px, py, range)) continue;
      if (px < 0.0 || py < 0.0 || px > src.width || py > src.height) continue;
      // Pixel centers sit at integer coordinates for sample_bilinear.
      const double sx = px - 0.5;
      const double sy = py - 0.5;
      if (sd) {
        const double seen = sample_bilinear(*sd, sx, sy, 0);
        if (seen > (1.0 + options.occlusion_tolerance) / range) continue;
      }
      out.valid.at(i, j) = 1.0f;
      for (int c = 0; c < source_rgb.channels; ++c) out.rgb.at(i, j, c) = sample_bilinear(source_rgb, sx, sy, c);
    }
  return out;
}

}  // namespace terra
