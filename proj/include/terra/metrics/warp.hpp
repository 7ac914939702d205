// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "terra/common/image.hpp"
#include "terra/render/camera.hpp"

namespace terra {

struct WarpResult {
  FloatImage rgb;    // target resolution, zero where invalid
  FloatImage valid;  // 1 channel, 0 or 1
};

struct WarpOptions {
  /// Target pixels with mask below this are sky. Ignored without a mask.
  double sky_threshold = 0.5;
  /// Optional source disparity for an occlusion test: a target pixel is
  /// dropped when the source sees something closer by more than this
  /// relative margin.
  const FloatImage* source_disparity = nullptr;
  double occlusion_tolerance = 0.05;
};

/// Backward warp: each target pixel is unprojected with its own disparity
/// (inverse distance along the ray), projected into the source camera and
/// bilinearly sampled there. Valid pixels have positive disparity, are not
/// sky, land inside the source frame and pass the occlusion test.
/// Camera resolutions are taken from the image sizes.
WarpResult backward_warp(const FloatImage& source_rgb, const Camera& source, const FloatImage& target_disparity,
                         const FloatImage* target_mask, const Camera& target, const WarpOptions& options = {});

}  // namespace terra
