#include <cstdlib>
#include <string_view>

#include "sprawl/simd/kernels.hpp"

namespace sprawl::simd {
namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::and_popcount, &scalar::and_into,
                              &scalar::lane_sum, &scalar::masked_lane_sum, &scalar::masked_scale};

#if SPRAWL_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{Isa::avx2, &avx2::and_popcount, &avx2::and_into, &avx2::lane_sum,
                            &avx2::masked_lane_sum, &avx2::masked_scale};
#endif

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("SPRAWL_ISA")) {
    if (std::string_view(forced) == "scalar") return kScalar;
  }
  return isa_available(Isa::avx2) ? kernels_for(Isa::avx2) : kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if SPRAWL_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) noexcept {
#if SPRAWL_HAVE_AVX2_KERNELS
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

const KernelTable& kernels() noexcept {
  static const KernelTable& selected = select();
  return selected;
}

}  // namespace sprawl::simd
