// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "terra/common/image.hpp"

namespace terra {

struct DisparityNormalization {
  double clip = 0.05;
  double scale = 1.0 / 16.0;
  double low_percentile = 1.0;
  double high_percentile = 99.0;
  double sky_threshold = 0.5;
};

/// Linear-interpolated percentile (0..100) of the values.
double percentile(std::span<const double> sorted, double p);

/// Percentile-stretches non-sky disparity to [0, 1], clips below at `clip`
/// and maps [clip, 1] linearly onto [scale, 1]. Sky pixels (mask below the
/// threshold, or raw <= 0 without a mask) become 0. A degenerate percentile
/// span maps every non-sky pixel to 1.
FloatImage normalize_disparity(const FloatImage& raw, const FloatImage* mask = nullptr,
                               const DisparityNormalization& params = {});

}  // namespace terra
