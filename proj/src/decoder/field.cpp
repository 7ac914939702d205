// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/decoder/field.hpp"

#include <algorithm>
#include <cmath>

#include "terra/common/error.hpp"

namespace terra {

NeuralField::NeuralField(std::shared_ptr<const FeatureField> layout, std::shared_ptr<const DecoderWeights> weights)
    : layout_(std::move(layout)), weights_(std::move(weights)) {
  require(layout_ && weights_, ErrorCode::configuration, "neural field needs a layout and decoder weights");
  require(layout_->channels() == weights_->config().feature_dim, ErrorCode::configuration,
          "layout has " + std::to_string(layout_->channels()) + " channels but the decoder expects " +
              std::to_string(weights_->config().feature_dim));
}

bool NeuralField::covers(double x, double z) const {
  thread_local std::vector<float> scratch;
  scratch.resize(static_cast<std::size_t>(layout_->channels()));
  return layout_->interpolate(x, z, scratch.data());
}

void NeuralField::decode(std::size_t count, const double* xyz, float* color, float* sigma,
                         std::uint8_t* covered) const {
  const int fd = layout_->channels();
  const int cd = color_channels();
  thread_local std::vector<float> feats, ys, col, sig;
  thread_local std::vector<std::size_t> rows;
  feats.resize(count * fd);
  ys.resize(count);
  rows.clear();
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = xyz + 3 * i;
    const std::size_t slot = rows.size();
    const bool inside = layout_->interpolate(p[0], p[2], feats.data() + slot * fd);
    covered[i] = inside ? 1 : 0;
    if (inside) {
      ys[slot] = static_cast<float>(p[1]);
      rows.push_back(i);
    } else {
      sigma[i] = 0.0f;
      std::fill_n(color + i * cd, cd, 0.0f);
    }
  }
  if (rows.empty()) return;
  col.resize(rows.size() * cd);
  sig.resize(rows.size());
  decode_batch(*weights_, rows.size(), feats.data(), ys.data(), col.data(), sig.data());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    sigma[rows[s]] = sig[s];
    std::copy_n(col.data() + s * cd, cd, color + rows[s] * cd);
  }
}

float density_at(const RadianceField& field, double x, double y, double z) {
  const double p[3] = {x, y, z};
  std::vector<float> color(static_cast<std::size_t>(field.color_channels()));
  float sigma = 0.0f;
  std::uint8_t covered = 0;
  field.decode(1, p, color.data(), &sigma, &covered);
  require(covered != 0, ErrorCode::out_of_bounds,
          "point (" + std::to_string(x) + ", " + std::to_string(z) + ") is outside the materialized layout");
  return sigma;
}

}  // namespace terra
