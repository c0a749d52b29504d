#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pairsamp {

namespace bits {

// Word-level kernels behind the coverage bitset loops. `or_into` is the hot
// path: OR-accumulating one configuration bitset per trail into a scratch
// accumulator. dst and srcs never alias in these loops.
struct Kernels {
  void (*or_into)(std::uint64_t *dst, const std::uint64_t *src,
                  std::size_t nwords);
  // dst = a & ~b
  void (*andnot_into)(std::uint64_t *dst, const std::uint64_t *a,
                      const std::uint64_t *b, std::size_t nwords);
};

const Kernels &scalar_kernels();
// AVX2 build of the same loops; null when unsupported by the running CPU.
const Kernels *avx2_kernels();
// Best supported variant, resolved once per process.
const Kernels &active_kernels();

}  // namespace bits

// Fixed-width bitset over 64-bit words. Width is set at construction (or
// resize) and ops assume equal widths.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t nbits) { resize(nbits); }

  void resize(std::size_t nbits) {
    nbits_ = nbits;
    words_.assign((nbits + 63) / 64, 0);
  }
  std::size_t size() const { return nbits_; }
  std::size_t num_words() const { return words_.size(); }
  std::uint64_t *data() { return words_.data(); }
  const std::uint64_t *data() const { return words_.data(); }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  void clear(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  void reset() { std::fill(words_.begin(), words_.end(), 0); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += std::size_t(__builtin_popcountll(w));
    return n;
  }
  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  void or_with(const Bitset &o) {
    bits::active_kernels().or_into(data(), o.data(), num_words());
  }

  // Calls fn(index) for every set bit, ascending.
  template <typename Fn>
  void for_each_set(Fn &&fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        std::size_t bit = std::size_t(__builtin_ctzll(w));
        fn(wi * 64 + bit);
        w &= w - 1;
      }
    }
  }

  friend bool operator==(const Bitset &a, const Bitset &b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t nbits_ = 0;
};

}  // namespace pairsamp
