// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <immintrin.h>

#include "terra/simd/kernels.hpp"

namespace terra::simd {
namespace {

inline __mmask16 tail_mask(int count) { return static_cast<__mmask16>((1u << count) - 1u); }

template <int R, int NV>
inline void micro(int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc, bool accumulate,
                  int last) {
  __m512 acc[R][NV];
  const __mmask16 mask = last >= 16 ? static_cast<__mmask16>(0xFFFF) : tail_mask(last);
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < NV; ++v) {
      const float* src = c + static_cast<long>(r) * ldc + 16 * v;
      if (!accumulate)
        acc[r][v] = _mm512_setzero_ps();
      else
        acc[r][v] = (v == NV - 1) ? _mm512_maskz_loadu_ps(mask, src) : _mm512_loadu_ps(src);
    }
  for (int p = 0; p < k; ++p) {
    const float* brow = b + static_cast<long>(p) * ldb;
    __m512 bv[NV];
    for (int v = 0; v < NV; ++v)
      bv[v] = (v == NV - 1) ? _mm512_maskz_loadu_ps(mask, brow + 16 * v) : _mm512_loadu_ps(brow + 16 * v);
    for (int r = 0; r < R; ++r) {
      const __m512 av = _mm512_set1_ps(a[static_cast<long>(r) * lda + p]);
      for (int v = 0; v < NV; ++v) acc[r][v] = _mm512_fmadd_ps(av, bv[v], acc[r][v]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < NV; ++v) {
      float* dst = c + static_cast<long>(r) * ldc + 16 * v;
      if (v == NV - 1)
        _mm512_mask_storeu_ps(dst, mask, acc[r][v]);
      else
        _mm512_storeu_ps(dst, acc[r][v]);
    }
}

template <int R>
void row_block(int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc, bool accumulate) {
  int j = 0;
  for (; j + 32 <= n; j += 32) micro<R, 2>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, 16);
  if (j + 16 <= n) {
    micro<R, 1>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, 16);
    j += 16;
  }
  if (j < n) micro<R, 1>(k, a, lda, b + j, ldb, c + j, ldc, accumulate, n - j);
}

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
          bool accumulate) {
  int i = 0;
  for (; i + 8 <= m; i += 8)
    row_block<8>(n, k, a + static_cast<long>(i) * lda, lda, b, ldb, c + static_cast<long>(i) * ldc, ldc, accumulate);
  const float* ai = a + static_cast<long>(i) * lda;
  float* ci = c + static_cast<long>(i) * ldc;
  switch (m - i) {
    case 7: row_block<7>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 6: row_block<6>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 5: row_block<5>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 4: row_block<4>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 3: row_block<3>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 2: row_block<2>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    case 1: row_block<1>(n, k, ai, lda, b, ldb, ci, ldc, accumulate); break;
    default: break;
  }
}

void axpy(int n, float alpha, const float* x, float* y) {
  const __m512 av = _mm512_set1_ps(alpha);
  int i = 0;
  for (; i + 16 <= n; i += 16)
    _mm512_storeu_ps(y + i, _mm512_fmadd_ps(av, _mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i)));
  if (i < n) {
    const __mmask16 m = tail_mask(n - i);
    _mm512_mask_storeu_ps(y + i, m, _mm512_fmadd_ps(av, _mm512_maskz_loadu_ps(m, x + i), _mm512_maskz_loadu_ps(m, y + i)));
  }
}

void lerp4(int n, const float* w, const float* p0, const float* p1, const float* p2, const float* p3, float* out) {
  const __m512 w0 = _mm512_set1_ps(w[0]), w1 = _mm512_set1_ps(w[1]);
  const __m512 w2 = _mm512_set1_ps(w[2]), w3 = _mm512_set1_ps(w[3]);
  for (int i = 0; i < n; i += 16) {
    const __mmask16 m = n - i >= 16 ? static_cast<__mmask16>(0xFFFF) : tail_mask(n - i);
    __m512 acc = _mm512_mul_ps(w0, _mm512_maskz_loadu_ps(m, p0 + i));
    acc = _mm512_fmadd_ps(w1, _mm512_maskz_loadu_ps(m, p1 + i), acc);
    acc = _mm512_fmadd_ps(w2, _mm512_maskz_loadu_ps(m, p2 + i), acc);
    acc = _mm512_fmadd_ps(w3, _mm512_maskz_loadu_ps(m, p3 + i), acc);
    _mm512_mask_storeu_ps(out + i, m, acc);
  }
}

void leaky_relu(int n, float slope, float gain, float* x) {
  const __m512 pos = _mm512_set1_ps(gain);
  const __m512 neg = _mm512_set1_ps(slope * gain);
  const __m512 zero = _mm512_setzero_ps();
  for (int i = 0; i < n; i += 16) {
    const __mmask16 m = n - i >= 16 ? static_cast<__mmask16>(0xFFFF) : tail_mask(n - i);
    const __m512 v = _mm512_maskz_loadu_ps(m, x + i);
    const __mmask16 ge = _mm512_cmp_ps_mask(v, zero, _CMP_GE_OQ);
    const __m512 scale = _mm512_mask_blend_ps(ge, neg, pos);
    _mm512_mask_storeu_ps(x + i, m, _mm512_mul_ps(v, scale));
  }
}

void mul(int n, const float* s, float* x) {
  for (int i = 0; i < n; i += 16) {
    const __mmask16 m = n - i >= 16 ? static_cast<__mmask16>(0xFFFF) : tail_mask(n - i);
    _mm512_mask_storeu_ps(x + i, m, _mm512_mul_ps(_mm512_maskz_loadu_ps(m, x + i), _mm512_maskz_loadu_ps(m, s + i)));
  }
}

}  // namespace

const KernelTable& avx512_kernels() {
  static const KernelTable table{Isa::avx512, gemm, axpy, lerp4, leaky_relu, mul};
  return table;
}

}  // namespace terra::simd
