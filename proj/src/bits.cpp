#include "pairsamp/bits.hpp"

namespace pairsamp::bits {

namespace {

void or_into_scalar(std::uint64_t *dst, const std::uint64_t *src,
                    std::size_t nwords) {
  for (std::size_t i = 0; i < nwords; ++i) dst[i] |= src[i];
}

void andnot_into_scalar(std::uint64_t *dst, const std::uint64_t *a,
                        const std::uint64_t *b, std::size_t nwords) {
  for (std::size_t i = 0; i < nwords; ++i) dst[i] = a[i] & ~b[i];
}

}  // namespace

const Kernels &scalar_kernels() {
  static const Kernels k{or_into_scalar, andnot_into_scalar};
  return k;
}

const Kernels &active_kernels() {
  static const Kernels &k = []() -> const Kernels & {
    if (const Kernels *v = avx2_kernels()) return *v;
    return scalar_kernels();
  }();
  return k;
}

}  // namespace pairsamp::bits
