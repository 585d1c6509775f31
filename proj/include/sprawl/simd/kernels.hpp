#pragma once

// Data-parallel inner loops used by the miners and learners.
//
// Every kernel has a scalar reference in `sprawl::simd::scalar` and, on
// x86-64, an AVX2 variant in `sprawl::simd::avx2`. `kernels()` picks one at
// first use from CPUID; SPRAWL_ISA=scalar forces the reference path.
//
// Floating-point reductions use four fixed accumulation lanes (element i goes
// to lane i % 4, lanes combined as (l0 + l1) + (l2 + l3)) in every variant,
// so all variants return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sprawl::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa = Isa::scalar;
  // popcount(a & b) over `words` 64-bit words.
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  // out = a & b, returns popcount(out).
  std::uint64_t (*and_into)(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b,
                            std::size_t words);
  double (*lane_sum)(const double* values, std::size_t n);
  // Sum of values[i] where mask[i] != 0.
  double (*masked_lane_sum)(const double* values, const std::uint8_t* mask, std::size_t n);
  // values[i] *= factor where mask[i] != 0.
  void (*masked_scale)(double* values, const std::uint8_t* mask, double factor, std::size_t n);
};

bool isa_available(Isa isa) noexcept;

/// The table for a specific ISA. Requesting an unavailable ISA returns the
/// scalar table.
const KernelTable& kernels_for(Isa isa) noexcept;

/// The process-wide selection.
const KernelTable& kernels() noexcept;

namespace scalar {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t and_into(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b,
                       std::size_t words);
double lane_sum(const double* values, std::size_t n);
double masked_lane_sum(const double* values, const std::uint8_t* mask, std::size_t n);
void masked_scale(double* values, const std::uint8_t* mask, double factor, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SPRAWL_HAVE_AVX2_KERNELS 1
namespace avx2 {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t and_into(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b,
                       std::size_t words);
double lane_sum(const double* values, std::size_t n);
double masked_lane_sum(const double* values, const std::uint8_t* mask, std::size_t n);
void masked_scale(double* values, const std::uint8_t* mask, double factor, std::size_t n);
}  // namespace avx2
#else
#define SPRAWL_HAVE_AVX2_KERNELS 0
#endif

// Span conveniences over the selected table.
inline double sum(std::span<const double> values) {
  return kernels().lane_sum(values.data(), values.size());
}

inline double masked_sum(std::span<const double> values, std::span<const std::uint8_t> mask) {
  return kernels().masked_lane_sum(values.data(), mask.data(), values.size());
}

}  // namespace sprawl::simd
