// Copyright 2026 The probft Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "probft/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define PROBFT_HAVE_AVX2_PATH 1
#endif

namespace probft::kernels {

#ifdef PROBFT_HAVE_AVX2_PATH
namespace {

// counts >= q  <=>  max(counts, q) == counts, unsigned 16-bit lanes.
__attribute__((target("avx2"))) inline __m256i ge_mask(__m256i v, __m256i q) {
  return _mm256_cmpeq_epi16(_mm256_max_epu16(v, q), v);
}

__attribute__((target("avx2,popcnt"))) std::size_t count_at_least(const std::uint16_t* counts,
                                                                  std::size_t n, std::uint16_t q) {
  const __m256i qv = _mm256_set1_epi16(static_cast<short>(q));
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i));
    // Two mask bits per 16-bit lane.
    c += static_cast<std::size_t>(
             __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(ge_mask(v, qv))))) / 2;
  }
  for (; i < n; ++i) c += counts[i] >= q;
  return c;
}

__attribute__((target("avx2,popcnt"))) std::size_t mark_at_least(const std::uint16_t* counts,
                                                                 std::size_t n, std::uint16_t q,
                                                                 std::uint8_t* flags) {
  const __m256i qv = _mm256_set1_epi16(static_cast<short>(q));
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i + 16));
    const __m256i ma = _mm256_and_si256(ge_mask(a, qv), one);
    const __m256i mb = _mm256_and_si256(ge_mask(b, qv), one);
    // packus interleaves 128-bit halves; permute restores element order.
    __m256i packed = _mm256_packus_epi16(ma, mb);
    packed = _mm256_permute4x64_epi64(packed, 0xD8);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(flags + i), packed);
    const __m256i nz = _mm256_cmpeq_epi8(packed, _mm256_set1_epi8(1));
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(nz))));
  }
  for (; i < n; ++i) {
    flags[i] = counts[i] >= q;
    c += flags[i];
  }
  return c;
}

__attribute__((target("avx2"))) void accumulate(const std::uint8_t* flags, std::size_t n,
                                                std::uint32_t* acc) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i f8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(flags + i));
    const __m256i f32 = _mm256_cvtepu8_epi32(f8);
    __m256i* dst = reinterpret_cast<__m256i*>(acc + i);
    _mm256_storeu_si256(dst, _mm256_add_epi32(_mm256_loadu_si256(dst), f32));
  }
  for (; i < n; ++i) acc[i] += flags[i];
}

}  // namespace

const Table* avx2() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  static const Table t{"avx2", count_at_least, mark_at_least, accumulate};
  return ok ? &t : nullptr;
}

#else

const Table* avx2() { return nullptr; }

#endif

}  // namespace probft::kernels
