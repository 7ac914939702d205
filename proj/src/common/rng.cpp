// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/common/rng.hpp"

#include <cmath>
#include <numbers>

namespace terra {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::initializer_list<std::int64_t> tags) {
  std::uint64_t h = splitmix64(seed ^ 0x7465727261ull);
  for (std::int64_t t : tags) h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(t)));
  return h;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter + 0x632BE59BD9B4E019ull));
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void CounterRng::fill_gaussian(std::vector<float>& out, double scale) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(scale * gaussian(i));
}

}  // namespace terra
