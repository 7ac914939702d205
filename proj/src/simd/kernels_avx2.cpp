// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <immintrin.h>

#include <cstring>

#include "terra/simd/kernels.hpp"

namespace terra::simd {
namespace {

inline __m256i tail_mask(int count) {
  alignas(32) static const int kBits[16] = {-1, -1, -1, -1, -1, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0};
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kBits + 8 - count));
}

// R rows x NV vectors of 8 columns; the last vector is masked when `last` < 8.
template <int R, int NV>
inline void micro(int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc, bool accumulate,
                  int last) {
  __m256 acc[R][NV];
  const __m256i mask = tail_mask(last);
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < NV; ++v) {
      if (!accumulate) {
        acc[r][v] = _mm256_setzero_ps();
      } else if (v == NV - 1 && last < 8) {
        acc[r][v] = _mm256_maskload_ps(c + static_cast<long>(r) * ldc + 8 * v, mask);
      } else {
        acc[r][v] = _mm256_loadu_ps(c + static_cast<long>(r) * ldc + 8 * v);
      }
    }
  for (int p = 0; p < k; ++p) {
    const float* brow = b + static_cast<long>(p) * ldb;
    __m256 bv[NV];
    for (int v = 0; v < NV; ++v)
      bv[v] = (v == NV - 1 && last < 8) ? _mm256_maskload_ps(brow + 8 * v, mask) : _mm256_loadu_ps(brow + 8 * v);
    for (int r = 0; r < R; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + static_cast<long>(r) * lda + p);
      for (int v = 0; v < NV; ++v) acc[r][v] = _mm256_fmadd_ps(av, bv[v], acc[r][v]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < NV; ++v) {
      float* dst = c + static_cast<long>(r) * ldc + 8 * v;
      if (v == NV - 1 && last < 8)
        _mm256_maskstore_ps(dst, mask, acc[r][v]);
      else
        _mm256_storeu_ps(dst, acc[r][v]);
    }
}

template <int R>
void row_block(int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc, bool accumulate) {
  int j = 0;
  for (; j + 16 <= n; j += 16) micro<R, 2>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, 8);
  if (j + 8 <= n) {
    micro<R, 1>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, 8);
    j += 8;
  }
  if (j < n) micro<R, 1>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, n - j);
}

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
          bool accumulate) {
  int i = 0;
  for (; i + 6 <= m; i += 6)
    row_block<6>(n, k, a + static_cast<long>(i) * lda, lda, b, ldb, c + static_cast<long>(i) * ldc, ldc, accumulate);
  const float* ai = a + static_cast<long>(i) * lda;
  float* ci = c + static_cast<long>(i) * ldc;
  switch (m - i) {
    case 5: row_block<5>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 4: row_block<4>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 3: row_block<3>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 2: row_block<2>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 1: row_block<1>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    default: break;
  }
}

void axpy(int n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void lerp4(int n, const float* w, const float* p0, const float* p1, const float* p2, const float* p3, float* out) {
  const __m256 w0 = _mm256_set1_ps(w[0]), w1 = _mm256_set1_ps(w[1]);
  const __m256 w2 = _mm256_set1_ps(w[2]), w3 = _mm256_set1_ps(w[3]);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 acc = _mm256_mul_ps(w0, _mm256_loadu_ps(p0 + i));
    acc = _mm256_fmadd_ps(w1, _mm256_loadu_ps(p1 + i), acc);
    acc = _mm256_fmadd_ps(w2, _mm256_loadu_ps(p2 + i), acc);
    acc = _mm256_fmadd_ps(w3, _mm256_loadu_ps(p3 + i), acc);
    _mm256_storeu_ps(out + i, acc);
  }
  for (; i < n; ++i) out[i] = w[0] * p0[i] + w[1] * p1[i] + w[2] * p2[i] + w[3] * p3[i];
}

void leaky_relu(int n, float slope, float gain, float* x) {
  const __m256 pos = _mm256_set1_ps(gain);
  const __m256 neg = _mm256_set1_ps(slope * gain);
  const __m256 zero = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 scale = _mm256_blendv_ps(neg, pos, _mm256_cmp_ps(v, zero, _CMP_GE_OQ));
    _mm256_storeu_ps(x + i, _mm256_mul_ps(v, scale));
  }
  for (; i < n; ++i) x[i] *= x[i] >= 0.0f ? gain : slope * gain;
}

void mul(int n, const float* s, float* x) {
  int i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(s + i)));
  for (; i < n; ++i) x[i] *= s[i];
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::avx2, gemm, axpy, lerp4, leaky_relu, mul};
  return table;
}

}  // namespace terra::simd
