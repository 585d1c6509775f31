#include <bit>

#include "sprawl/simd/kernels.hpp"

namespace sprawl::simd::scalar {

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < words; ++i) count += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return count;
}

std::uint64_t and_into(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b,
                       std::size_t words) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < words; ++i) {
    out[i] = a[i] & b[i];
    count += static_cast<std::uint64_t>(std::popcount(out[i]));
  }
  return count;
}

double lane_sum(const double* values, std::size_t n) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lanes[i % 4] += values[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double masked_lane_sum(const double* values, const std::uint8_t* mask, std::size_t n) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lanes[i % 4] += mask[i] ? values[i] : 0.0;
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void masked_scale(double* values, const std::uint8_t* mask, double factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) values[i] *= factor;
  }
}

}  // namespace sprawl::simd::scalar
