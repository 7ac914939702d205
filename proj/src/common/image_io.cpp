// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "terra/common/error.hpp"
#include "terra/common/image.hpp"

namespace terra {

float sample_bilinear(const FloatImage& img, double x, double y, int c) {
  auto snap = [](double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
  };
  x = std::clamp(snap(x), 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(snap(y), 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  if (fx == 0.0 && fy == 0.0) return img.at(x0, y0, c);
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

FloatImage resize_bilinear(const FloatImage& src, int width, int height) {
  FloatImage out(width, height, src.channels);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < src.channels; ++c) out.at(x, y, c) = sample_bilinear(src, fx, fy, c);
    }
  }
  return out;
}

FloatImage downsample_box(const FloatImage& src, int factor) {
  require(factor >= 1, ErrorCode::argument, "downsample factor must be >= 1");
  if (factor == 1) return src;
  require(src.width % factor == 0 && src.height % factor == 0, ErrorCode::argument,
          "image size not divisible by downsample factor");
  FloatImage out(src.width / factor, src.height / factor, src.channels);
  const double norm = 1.0 / (static_cast<double>(factor) * factor);
  std::vector<double> acc(static_cast<std::size_t>(src.channels));
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int dy = 0; dy < factor; ++dy)
        for (int dx = 0; dx < factor; ++dx) {
          auto p = src.pixel(x * factor + dx, y * factor + dy);
          for (int c = 0; c < src.channels; ++c) acc[c] += p[c];
        }
      for (int c = 0; c < src.channels; ++c) out.at(x, y, c) = static_cast<float>(acc[c] * norm);
    }
  }
  return out;
}

ByteImage to_bytes(const FloatImage& img) {
  ByteImage out(img.width, img.height, img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const float v = std::isfinite(img.data[i]) ? std::clamp(img.data[i], 0.0f, 1.0f) : 0.0f;
    out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  return out;
}

FloatImage from_bytes(const ByteImage& img) {
  FloatImage out(img.width, img.height, img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i] / 255.0f;
  return out;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return tail == suffix;
}

int png_color_type(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: fail(ErrorCode::argument, "PNG supports 1, 3 or 4 channels, got " + std::to_string(channels));
  }
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

[[noreturn]] void png_error_throw(png_structp, png_const_charp msg) { fail(ErrorCode::io, std::string("libpng: ") + msg); }

void png_warning_ignore(png_structp, png_const_charp) {}

void write_ppm(const std::string& path, const ByteImage& img) {
  require(img.channels == 3 || img.channels == 1, ErrorCode::argument, "PPM/PGM needs 1 or 3 channels");
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot open " + path + " for writing");
  f << (img.channels == 3 ? "P6\n" : "P5\n") << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  require(f.good(), ErrorCode::io, "write failed for " + path);
}

ByteImage read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot open " + path);
  std::string magic;
  f >> magic;
  require(magic == "P6" || magic == "P5", ErrorCode::io, path + ": not a binary PPM/PGM");
  auto next_int = [&] {
    f >> std::ws;
    while (f.peek() == '#') {
      std::string line;
      std::getline(f, line);
      f >> std::ws;
    }
    int v = 0;
    f >> v;
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  f.get();
  require(w > 0 && h > 0 && maxval == 255, ErrorCode::io, path + ": unsupported PPM header");
  ByteImage img(w, h, magic == "P6" ? 3 : 1);
  f.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  require(f.gcount() == static_cast<std::streamsize>(img.data.size()), ErrorCode::truncated, path + ": short pixel data");
  return img;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ByteImage& img) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  require(png != nullptr, ErrorCode::internal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               png_color_type(img.channels), PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.data.data() + stride * y));
  png_write_end(png, nullptr);
  return out;
}

void write_image(const std::string& path, const ByteImage& img) {
  if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm")) {
    write_ppm(path, img);
    return;
  }
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::io, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(f.good(), ErrorCode::io, "write failed for " + path);
}

ByteImage read_image(const std::string& path) {
  if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm")) return read_ppm(path);
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  require(file != nullptr, ErrorCode::io, "cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  require(png != nullptr, ErrorCode::internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  ByteImage img(w, h, channels);
  const std::size_t stride = static_cast<std::size_t>(w) * channels;
  require(png_get_rowbytes(png, info) == stride, ErrorCode::io, path + ": unexpected PNG row layout");
  for (int y = 0; y < h; ++y) png_read_row(png, img.data.data() + stride * y, nullptr);
  return img;
}

}  // namespace terra
