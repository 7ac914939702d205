// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace terra {

/// Named row-major float tensor.
struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

/// Versioned weight container shared by the decoder and refiner.
///
/// Layout (little-endian): magic "TWGT", u32 version, u8 endianness tag
/// (1 = little), 3 pad bytes, kind string, u32 tensor count, then per tensor
/// a name string, u32 rank, u32 dims, f32 data. Strings are u32 length +
/// bytes.
struct WeightContainer {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;
  std::vector<Tensor> tensors;

  const Tensor& get(const std::string& name) const;
  /// Same, checking the shape.
  const Tensor& get(const std::string& name, std::initializer_list<std::uint32_t> shape) const;
  void add(std::string name, std::vector<std::uint32_t> shape, std::vector<float> data);

  std::vector<std::uint8_t> serialize() const;
  static WeightContainer parse(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  static WeightContainer load(const std::string& path);

  bool operator==(const WeightContainer&) const = default;
};

}  // namespace terra
