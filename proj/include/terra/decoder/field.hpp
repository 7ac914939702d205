// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "terra/decoder/decoder.hpp"
#include "terra/grid/layout_grid.hpp"

namespace terra {

/// Anything that maps world points to (color feature, density). The renderer
/// only talks to this interface.
class RadianceField {
 public:
  virtual ~RadianceField() = default;

  virtual int color_channels() const = 0;

  /// Decodes `count` points given as xyz triples. covered[i] = 0 marks a point
  /// whose (x, z) lies outside the field's materialized extent; its outputs
  /// are zero.
  virtual void decode(std::size_t count, const double* xyz, float* color, float* sigma,
                      std::uint8_t* covered) const = 0;

  /// Whether (x, z) is inside the materialized extent.
  virtual bool covers(double x, double z) const = 0;
  /// Height above which density is exactly zero everywhere.
  virtual double empty_above() const { return std::numeric_limits<double>::infinity(); }
};

/// Layout features lifted by the modulated MLP.
class NeuralField final : public RadianceField {
 public:
  NeuralField(std::shared_ptr<const FeatureField> layout, std::shared_ptr<const DecoderWeights> weights);

  int color_channels() const override { return weights_->config().color_dim; }
  void decode(std::size_t count, const double* xyz, float* color, float* sigma, std::uint8_t* covered) const override;
  bool covers(double x, double z) const override;
  double empty_above() const override { return weights_->config().surface_amplitude; }

  const FeatureField& layout() const { return *layout_; }
  const DecoderWeights& weights() const { return *weights_; }

 private:
  std::shared_ptr<const FeatureField> layout_;
  std::shared_ptr<const DecoderWeights> weights_;
};

/// Density at one point through the field. Throws out_of_bounds outside the
/// materialized extent.
float density_at(const RadianceField& field, double x, double y, double z);

}  // namespace terra
