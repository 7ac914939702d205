// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/render/composite.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "terra/common/error.hpp"

namespace terra {
namespace {

void check_sample(double sigma, double delta, std::size_t i, std::int64_t ray) {
  if (!std::isfinite(sigma) || sigma < 0.0)
    fail(ErrorCode::numeric, "ray " + std::to_string(ray) + " sample " + std::to_string(i) +
                                 ": density must be finite and non-negative, got " + std::to_string(sigma));
  if (!std::isfinite(delta) || delta <= 0.0)
    fail(ErrorCode::numeric, "ray " + std::to_string(ray) + " sample " + std::to_string(i) +
                                 ": segment length must be positive, got " + std::to_string(delta));
}

}  // namespace

void compositing_weights(std::span<const double> sigma, std::span<const double> delta, std::span<double> weights,
                         std::int64_t ray) {
  require(sigma.size() == delta.size() && sigma.size() == weights.size(), ErrorCode::argument,
          "compositing inputs differ in length");
  double optical = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    check_sample(sigma[i], delta[i], i, ray);
    const double tau = sigma[i] * delta[i];
    weights[i] = -std::expm1(-tau) * std::exp(-optical);
    optical += tau;
  }
}

RayComposite composite_ray(std::span<const double> sigma, std::span<const double> delta,
                           std::span<const double> disparity, std::span<const double> features, int channels,
                           std::span<const double> noise, std::int64_t ray) {
  const std::size_t n = sigma.size();
  require(disparity.size() == n && noise.size() == n && features.size() == n * static_cast<std::size_t>(channels),
          ErrorCode::argument, "composite inputs differ in length");
  std::vector<double> w(n);
  compositing_weights(sigma, delta, w, ray);
  RayComposite out;
  out.feature.assign(static_cast<std::size_t>(channels), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.mask += w[i];
    out.disparity += w[i] * disparity[i];
    out.noise += w[i] * noise[i];
    for (int c = 0; c < channels; ++c) out.feature[c] += w[i] * features[i * channels + c];
  }
  return out;
}

double transparency_loss_from_alpha(std::span<const double> alpha, std::span<const double> delta) {
  require(alpha.size() == delta.size(), ErrorCode::argument, "transparency inputs differ in length");
  double transmittance = 1.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double w = alpha[i] * transmittance;
    if (i > 0) loss += w * std::max(alpha[i - 1] - alpha[i], 0.0) / delta[i];
    transmittance *= 1.0 - alpha[i];
  }
  return loss;
}

double transparency_loss(std::span<const double> sigma, std::span<const double> delta) {
  require(sigma.size() == delta.size(), ErrorCode::argument, "transparency inputs differ in length");
  std::vector<double> alpha(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    check_sample(sigma[i], delta[i], i, -1);
    alpha[i] = -std::expm1(-sigma[i] * delta[i]);
  }
  return transparency_loss_from_alpha(alpha, delta);
}

}  // namespace terra
