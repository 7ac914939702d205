// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "terra/common/image.hpp"

namespace terra {

/// Float buffer container: magic "TFB1", u32 width, u32 height, u32 channels,
/// then little-endian float32 samples, interleaved row-major.
std::vector<std::uint8_t> encode_float_image(const FloatImage& img);
FloatImage decode_float_image(std::span<const std::uint8_t> bytes);

void write_float_image(const std::string& path, const FloatImage& img);
FloatImage read_float_image(const std::string& path);

}  // namespace terra
