// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace terra {

/// Interleaved row-major image: element (x, y, c) lives at
/// ((y * width) + x) * channels + c.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T{})
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

  std::span<T> pixel(int x, int y) { return {data.data() + index(x, y), static_cast<std::size_t>(channels)}; }
  std::span<const T> pixel(int x, int y) const {
    return {data.data() + index(x, y), static_cast<std::size_t>(channels)};
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  bool operator==(const Image&) const = default;
};

using FloatImage = Image<float>;
using ByteImage = Image<std::uint8_t>;

/// Bilinear read at continuous pixel coordinates (pixel centers at integer
/// coordinates), clamping to the border. Fractions within 1e-9 of a pixel
/// center snap to it so aligned reads are exact.
float sample_bilinear(const FloatImage& img, double x, double y, int c);

/// Bilinear resize with half-pixel-center alignment and border clamping.
FloatImage resize_bilinear(const FloatImage& src, int width, int height);

/// Box-filter downsample by an integer factor.
FloatImage downsample_box(const FloatImage& src, int factor);

/// Converts [0,1] floats to 8-bit with clamping and round-to-nearest.
ByteImage to_bytes(const FloatImage& img);
FloatImage from_bytes(const ByteImage& img);

// 8-bit image files. Format picked from the extension (.png or .ppm).
void write_image(const std::string& path, const ByteImage& img);
ByteImage read_image(const std::string& path);
std::vector<std::uint8_t> encode_png(const ByteImage& img);

}  // namespace terra
