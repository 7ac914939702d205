// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "terra/common/image.hpp"
#include "terra/metrics/warp.hpp"
#include "terra/render/camera.hpp"

namespace terra {

/// Final frame of the pipeline at output resolution.
struct Frame {
  FloatImage rgb;        // 3 channels in [0, 1]
  FloatImage disparity;  // 1
  FloatImage mask;       // 1
};

using FrameRenderer = std::function<Frame(const Camera&)>;
/// Disparity at a camera from some other source (e.g. an analytic oracle).
using DisparitySource = std::function<FloatImage(const Camera&)>;

struct ConsistencyResult {
  double value = 0.0;           // 100 x mean L1
  double valid_fraction = 0.0;  // share of pixels that entered the mean
};

/// 100 x mean L1 over [0,1] RGB between two images, optionally restricted to
/// pixels where `valid` is nonzero.
ConsistencyResult l1_x100(const FloatImage& a, const FloatImage& b, const FloatImage* valid = nullptr);

/// Renders at `pose` and `next`, backward-warps the second frame to the first
/// camera using the first frame's disparity (or `depth` when given) and
/// returns 100 x mean L1 over valid pixels.
ConsistencyResult one_step_consistency(const FrameRenderer& render, const Camera& pose, const Camera& next,
                                       const DisparitySource* depth = nullptr);

/// Renders at `pose`, at `next`, then at `pose` again and returns 100 x mean
/// L1 between the first and last frames over the full frame. `between` runs
/// after the first render (a test hook for negative controls).
ConsistencyResult cycle_consistency(const FrameRenderer& render, const Camera& pose, const Camera& next,
                                    const std::function<void()>& between = {});

}  // namespace terra
