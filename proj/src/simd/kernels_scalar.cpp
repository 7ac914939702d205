// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstring>

#include "terra/simd/kernels.hpp"

namespace terra::simd {
namespace {

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
          bool accumulate) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<long>(i) * ldc;
    if (!accumulate) std::memset(crow, 0, sizeof(float) * n);
    const float* arow = a + static_cast<long>(i) * lda;
    for (int p = 0; p < k; ++p) {
      const float av = arow[p];
      const float* brow = b + static_cast<long>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void axpy(int n, float alpha, const float* x, float* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void lerp4(int n, const float* w, const float* p0, const float* p1, const float* p2, const float* p3, float* out) {
  for (int i = 0; i < n; ++i) out[i] = w[0] * p0[i] + w[1] * p1[i] + w[2] * p2[i] + w[3] * p3[i];
}

void leaky_relu(int n, float slope, float gain, float* x) {
  for (int i = 0; i < n; ++i) x[i] *= x[i] >= 0.0f ? gain : slope * gain;
}

void mul(int n, const float* s, float* x) {
  for (int i = 0; i < n; ++i) x[i] *= s[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, gemm, axpy, lerp4, leaky_relu, mul};
  return table;
}

}  // namespace terra::simd
