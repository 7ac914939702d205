// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/decoder/weight_file.hpp"

#include <algorithm>
#include <cmath>

#include "terra/common/bytes.hpp"
#include "terra/common/error.hpp"

namespace terra {
namespace {

constexpr char kMagic[4] = {'T', 'W', 'G', 'T'};
constexpr std::uint8_t kLittleEndian = 1;

std::string shape_string(const std::vector<std::uint32_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

const Tensor& WeightContainer::get(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  fail(ErrorCode::configuration, kind + " weights have no tensor '" + name + "'");
}

const Tensor& WeightContainer::get(const std::string& name, std::initializer_list<std::uint32_t> shape) const {
  const Tensor& t = get(name);
  const std::vector<std::uint32_t> want(shape);
  require(t.shape == want, ErrorCode::configuration,
          "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " + shape_string(want));
  return t;
}

void WeightContainer::add(std::string name, std::vector<std::uint32_t> shape, std::vector<float> data) {
  Tensor t{std::move(name), std::move(shape), std::move(data)};
  require(t.element_count() == t.data.size(), ErrorCode::internal, "tensor '" + t.name + "' size mismatch");
  tensors.push_back(std::move(t));
}

std::vector<std::uint8_t> WeightContainer::serialize() const {
  ByteWriter w;
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u32(kVersion);
  w.u8(kLittleEndian);
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.str(kind);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(d);
    w.f32s(t.data);
  }
  return w.take();
}

WeightContainer WeightContainer::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "weight file");
  auto magic = r.take(4);
  require(std::equal(magic.begin(), magic.end(), kMagic), ErrorCode::configuration, "not a weight file (bad magic)");
  const std::uint32_t version = r.u32();
  require(version == kVersion, ErrorCode::version,
          "weight file version " + std::to_string(version) + " is not supported (this build reads version " +
              std::to_string(kVersion) + ")");
  require(r.u8() == kLittleEndian, ErrorCode::configuration, "weight file declares an unsupported byte order");
  r.take(3);
  WeightContainer c;
  c.kind = r.str();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = r.str();
    const std::uint32_t rank = r.u32();
    require(rank <= 8, ErrorCode::configuration, "tensor '" + t.name + "' has implausible rank");
    for (std::uint32_t k = 0; k < rank; ++k) t.shape.push_back(r.u32());
    t.data = r.f32s(t.element_count());
    for (float v : t.data)
      require(std::isfinite(v), ErrorCode::numeric, "tensor '" + t.name + "' contains a non-finite value");
    c.tensors.push_back(std::move(t));
  }
  require(r.done(), ErrorCode::configuration, "weight file has trailing bytes");
  return c;
}

void WeightContainer::save(const std::string& path) const { write_file_bytes(path, serialize()); }

WeightContainer WeightContainer::load(const std::string& path) { return parse(read_file_bytes(path)); }

}  // namespace terra
