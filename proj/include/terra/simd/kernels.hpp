// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

namespace terra::simd {

enum class Isa { scalar, avx2, avx512 };

std::string_view to_string(Isa isa);

// Inner loops of the generator, decoder and compositor. Every table entry has
// a scalar reference in kernels_scalar.cpp; vector variants must agree with it
// to float rounding (they may fuse multiply-adds, so results are not bitwise
// equal across ISAs, only within one).
struct KernelTable {
  Isa isa;

  // c[m x n] (+)= a[m x k] * b[k x n], all row-major with leading dimensions.
  void (*gemm)(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
               bool accumulate);

  // y += alpha * x
  void (*axpy)(int n, float alpha, const float* x, float* y);

  // out = w[0]*p0 + w[1]*p1 + w[2]*p2 + w[3]*p3
  void (*lerp4)(int n, const float* w, const float* p0, const float* p1, const float* p2, const float* p3,
                float* out);

  // x = x >= 0 ? x * gain : x * slope * gain
  void (*leaky_relu)(int n, float slope, float gain, float* x);

  // x *= s elementwise
  void (*mul)(int n, const float* s, float* x);
};

const KernelTable& scalar_kernels();

/// Table for a specific ISA, or nullptr when the binary was built without it
/// or the running CPU lacks it.
const KernelTable* kernels_for(Isa isa);

/// Best table for this CPU, chosen once per process. TERRA_SIMD=scalar|avx2|avx512
/// caps the choice.
const KernelTable& kernels();

std::vector<Isa> available_isas();

}  // namespace terra::simd
