// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace terra {

/// Stateless counter-based generator. Every draw is a pure function of
/// (key, counter), so tensors can be filled in any order or in parallel and
/// still come out bit-identical.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Derives a child key from a parent seed and any number of integer tags
  /// (layer index, tensor index, lattice coordinates...).
  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::int64_t> tags);

  std::uint64_t key() const { return key_; }
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller over two uniforms at (2c, 2c+1).
  double gaussian(std::uint64_t counter) const;

  void fill_gaussian(std::vector<float>& out, double scale) const;

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace terra
