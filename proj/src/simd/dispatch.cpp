// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string>

#include "terra/simd/kernels.hpp"

namespace terra::simd {

#if TERRA_BUILD_AVX2
const KernelTable& avx2_kernels();
#endif
#if TERRA_BUILD_AVX512
const KernelTable& avx512_kernels();
#endif

namespace {

bool cpu_has(Isa isa) {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512: return __builtin_cpu_supports("avx512f");
  }
  return false;
#else
  return isa == Isa::scalar;
#endif
}

int rank(Isa isa) { return static_cast<int>(isa); }

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar: return &scalar_kernels();
#if TERRA_BUILD_AVX2
    case Isa::avx2: return &avx2_kernels();
#endif
#if TERRA_BUILD_AVX512
    case Isa::avx512: return &avx512_kernels();
#endif
    default: return nullptr;
  }
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::avx512})
    if (kernels_for(isa) != nullptr) out.push_back(isa);
  return out;
}

const KernelTable& kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    int cap = rank(Isa::avx512);
    if (const char* env = std::getenv("TERRA_SIMD")) {
      const std::string v = env;
      if (v == "scalar") cap = rank(Isa::scalar);
      else if (v == "avx2") cap = rank(Isa::avx2);
    }
    const KernelTable* best = &scalar_kernels();
    for (Isa isa : available_isas())
      if (rank(isa) <= cap) best = kernels_for(isa);
    return *best;
  }();
  return chosen;
}

}  // namespace terra::simd
