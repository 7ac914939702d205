// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include "terra/render/float_image.hpp"

#include <algorithm>

#include "terra/common/bytes.hpp"
#include "terra/common/error.hpp"

namespace terra {
namespace {

constexpr char kMagic[4] = {'T', 'F', 'B', '1'};

}  // namespace

std::vector<std::uint8_t> encode_float_image(const FloatImage& img) {
  ByteWriter w;
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u32(static_cast<std::uint32_t>(img.width));
  w.u32(static_cast<std::uint32_t>(img.height));
  w.u32(static_cast<std::uint32_t>(img.channels));
  w.f32s(img.data);
  return w.take();
}

FloatImage decode_float_image(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "float image");
  auto magic = r.take(4);
  require(std::equal(magic.begin(), magic.end(), kMagic), ErrorCode::configuration, "not a float image (bad magic)");
  const std::uint32_t w = r.u32();
  const std::uint32_t h = r.u32();
  const std::uint32_t c = r.u32();
  require(w >= 1 && h >= 1 && c >= 1 && w <= (1u << 16) && h <= (1u << 16) && c <= 4096, ErrorCode::configuration,
          "float image has implausible shape");
  FloatImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.channels = static_cast<int>(c);
  img.data = r.f32s(static_cast<std::size_t>(w) * h * c);
  require(r.done(), ErrorCode::configuration, "float image has trailing bytes");
  return img;
}

void write_float_image(const std::string& path, const FloatImage& img) {
  write_file_bytes(path, encode_float_image(img));
}

FloatImage read_float_image(const std::string& path) { return decode_float_image(read_file_bytes(path)); }

}  // namespace terra
