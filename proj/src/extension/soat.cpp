// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/extension/soat.hpp"

#include "terra/common/error.hpp"
#include "terra/common/parallel.hpp"
#include "terra/common/rng.hpp"
#include "terra/simd/kernels.hpp"

namespace terra {

BlendWeights blend_weights(double u, double v) {
  require(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0, ErrorCode::argument,
          "blend coordinates must lie in [0,1], got (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  return {(1.0 - u) * (1.0 - v), (1.0 - u) * v, u * (1.0 - v), u * v};
}

FloatImage soat_layer_styled(const FloatImage& f, const std::array<std::vector<float>, 4>& styles,
                             std::size_t layer, const GeneratorStack& stack) {
  const bool all_equal = styles[0] == styles[1] && styles[0] == styles[2] && styles[0] == styles[3];
  if (all_equal) return stack.apply_layer(layer, stack.modulate(layer, styles[0]), f, Padding::zero);

  std::array<FloatImage, 4> branch;
  for (int k = 0; k < 4; ++k) branch[k] = stack.apply_layer(layer, stack.modulate(layer, styles[k]), f, Padding::zero);

  FloatImage out(branch[0].width, branch[0].height, branch[0].channels);
  const double du = out.height > 1 ? 1.0 / (out.height - 1) : 0.0;
  const double dv = out.width > 1 ? 1.0 / (out.width - 1) : 0.0;
  const auto& kern = simd::kernels();
  parallel_for(static_cast<std::size_t>(out.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    const double u = y == out.height - 1 ? 1.0 : y * du;
    for (int x = 0; x < out.width; ++x) {
      const double v = x == out.width - 1 ? 1.0 : x * dv;
      const BlendWeights b = blend_weights(u, v);
      const float w[4] = {static_cast<float>(b.b00), static_cast<float>(b.b01), static_cast<float>(b.b10),
                          static_cast<float>(b.b11)};
      kern.lerp4(out.channels, w, branch[0].pixel(x, y).data(), branch[1].pixel(x, y).data(),
                 branch[2].pixel(x, y).data(), branch[3].pixel(x, y).data(), out.pixel(x, y).data());
    }
  });
  return out;
}

FloatImage soat_layer(const FloatImage& f, const CornerCodes& codes, std::size_t layer, const GeneratorStack& stack) {
  const std::array<std::vector<float>, 4> styles = {stack.map_latent(codes[0]), stack.map_latent(codes[1]),
                                                   stack.map_latent(codes[2]), stack.map_latent(codes[3])};
  return soat_layer_styled(f, styles, layer, stack);
}

FloatImage synthesize_subgrid(const CornerCodes& codes, const GeneratorStack& stack) {
  const std::array<std::vector<float>, 4> styles = {stack.map_latent(codes[0]), stack.map_latent(codes[1]),
                                                   stack.map_latent(codes[2]), stack.map_latent(codes[3])};
  FloatImage f = stack.constant_block(2, 2);
  for (std::size_t l = 0; l < stack.layer_count(); ++l) f = soat_layer_styled(f, styles, l, stack);
  return f;
}

LatentCode lattice_code(std::uint64_t world_seed, std::int64_t row, std::int64_t col, int latent_dim) {
  return LatentCode::draw(CounterRng::derive(world_seed, {0x6c617474, row, col}), latent_dim);
}

LatentLattice LatentLattice::from_world_seed(std::uint64_t world_seed, int row0, int col0, int rows, int cols,
                                             int latent_dim) {
  LatentLattice lat;
  lat.rows = rows;
  lat.cols = cols;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) lat.codes.push_back(lattice_code(world_seed, row0 + r, col0 + c, latent_dim));
  return lat;
}

}  // namespace terra
