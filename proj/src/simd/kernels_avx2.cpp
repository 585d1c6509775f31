// AVX2 variants. Compiled without global -mavx2 so that no AVX2 code leaks
// into inline functions shared with other translation units; each function
// opts in through the target attribute and is only reached after CPUID says
// AVX2 is present.

#include "sprawl/simd/kernels.hpp"

#if SPRAWL_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <bit>
#include <cstring>

#define SPRAWL_AVX2 __attribute__((target("avx2")))

namespace sprawl::simd::avx2 {
namespace {

// Nibble lookup popcount; returns per-64-bit-lane bit counts.
SPRAWL_AVX2 inline __m256i popcount_epi64(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,  //
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(bytes, _mm256_setzero_si256());
}

SPRAWL_AVX2 inline std::uint64_t horizontal_add_epi64(__m256i v) {
  alignas(32) std::uint64_t parts[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(parts), v);
  return parts[0] + parts[1] + parts[2] + parts[3];
}

// 0 / all-ones per double lane from four mask bytes.
SPRAWL_AVX2 inline __m256d lane_mask(const std::uint8_t* mask) {
  std::int32_t packed = 0;
  std::memcpy(&packed, mask, sizeof(packed));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

SPRAWL_AVX2 inline double combine_lanes(__m256d acc, const double* tail, const std::uint8_t* tail_mask,
                                        std::size_t tail_n) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (std::size_t i = 0; i < tail_n; ++i) {
    lanes[i] += (tail_mask == nullptr || tail_mask[i]) ? tail[i] : 0.0;
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

SPRAWL_AVX2 std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b,
                                       std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_and_si256(va, vb)));
  }
  std::uint64_t count = horizontal_add_epi64(acc);
  for (; i < words; ++i) count += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return count;
}

SPRAWL_AVX2 std::uint64_t and_into(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b,
                                   std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i v = _mm256_and_si256(va, vb);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), v);
    acc = _mm256_add_epi64(acc, popcount_epi64(v));
  }
  std::uint64_t count = horizontal_add_epi64(acc);
  for (; i < words; ++i) {
    out[i] = a[i] & b[i];
    count += static_cast<std::uint64_t>(std::popcount(out[i]));
  }
  return count;
}

SPRAWL_AVX2 double lane_sum(const double* values, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(values + i));
  return combine_lanes(acc, values + i, nullptr, n - i);
}

SPRAWL_AVX2 double masked_lane_sum(const double* values, const std::uint8_t* mask, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(values + i), lane_mask(mask + i)));
  }
  return combine_lanes(acc, values + i, mask + i, n - i);
}

SPRAWL_AVX2 void masked_scale(double* values, const std::uint8_t* mask, double factor, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(values + i);
    _mm256_storeu_pd(values + i, _mm256_blendv_pd(v, _mm256_mul_pd(v, f), lane_mask(mask + i)));
  }
  for (; i < n; ++i) {
    if (mask[i]) values[i] *= factor;
  }
}

}  // namespace sprawl::simd::avx2

#endif
