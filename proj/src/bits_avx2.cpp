// AVX2 builds of the bitset kernels. This translation unit is compiled with
// -mavx2; callers reach it only through avx2_kernels(), which checks CPU
// support first.

#include "pairsamp/bits.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace pairsamp::bits {

namespace {

void or_into_avx2(std::uint64_t *dst, const std::uint64_t *src,
                  std::size_t nwords) {
  std::size_t i = 0;
  for (; i + 4 <= nwords; i += 4) {
    __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(dst + i));
    __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i),
                        _mm256_or_si256(d, s));
  }
  for (; i < nwords; ++i) dst[i] |= src[i];
}

void andnot_into_avx2(std::uint64_t *dst, const std::uint64_t *a,
                      const std::uint64_t *b, std::size_t nwords) {
  std::size_t i = 0;
  for (; i + 4 <= nwords; i += 4) {
    __m256i av = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
    __m256i bv = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i));
    // _mm256_andnot_si256 computes ~first & second.
    _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i),
                        _mm256_andnot_si256(bv, av));
  }
  for (; i < nwords; ++i) dst[i] = a[i] & ~b[i];
}

}  // namespace

const Kernels *avx2_kernels() {
  static const Kernels k{or_into_avx2, andnot_into_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &k : nullptr;
}

}  // namespace pairsamp::bits

#else

namespace pairsamp::bits {

const Kernels *avx2_kernels() { return nullptr; }

}  // namespace pairsamp::bits

#endif
