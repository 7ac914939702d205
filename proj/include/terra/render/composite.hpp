// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace terra {

/// alpha_i = 1 - exp(-sigma_i delta_i), w_i = alpha_i exp(-sum_{j<i} sigma_j delta_j).
/// Throws a numeric error naming `ray` for negative or non-finite density.
void compositing_weights(std::span<const double> sigma, std::span<const double> delta, std::span<double> weights,
                         std::int64_t ray = -1);

struct RayComposite {
  std::vector<double> feature;
  double disparity = 0.0;
  double mask = 0.0;
  double noise = 0.0;
};

/// Composites one ray: features are [N x C] row-major, disparity d_i and
/// noise n_i are per sample.
RayComposite composite_ray(std::span<const double> sigma, std::span<const double> delta,
                           std::span<const double> disparity, std::span<const double> features, int channels,
                           std::span<const double> noise, std::int64_t ray = -1);

/// sum_{i>=2} w_i max(alpha_{i-1} - alpha_i, 0) / delta_i from densities.
double transparency_loss(std::span<const double> sigma, std::span<const double> delta);

/// Same, given opacities directly (w_i = alpha_i prod_{j<i} (1 - alpha_j)).
double transparency_loss_from_alpha(std::span<const double> alpha, std::span<const double> delta);

}  // namespace terra
