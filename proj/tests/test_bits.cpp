#include <doctest.h>

#include <random>

#include "pairsamp/bits.hpp"

using namespace pairsamp;

TEST_CASE("bitset basics") {
  Bitset b(130);
  CHECK(b.size() == 130);
  CHECK(b.num_words() == 3);
  CHECK_FALSE(b.any());
  b.set(0);
  b.set(64);
  b.set(129);
  CHECK(b.count() == 3);
  CHECK(b.test(64));
  b.clear(64);
  CHECK_FALSE(b.test(64));
  std::vector<std::size_t> seen;
  b.for_each_set([&](std::size_t i) { seen.push_back(i); });
  CHECK(seen == std::vector<std::size_t>{0, 129});
  b.reset();
  CHECK_FALSE(b.any());
}

TEST_CASE("kernel variants agree on random data") {
  const auto &scalar = bits::scalar_kernels();
  const auto &active = bits::active_kernels();
  const auto *avx2 = bits::avx2_kernels();
  INFO("avx2 available: " << (avx2 != nullptr));

  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 200; ++iter) {
    std::uniform_int_distribution<std::size_t> nd(1, 97);
    std::size_t n = nd(rng);
    std::vector<std::uint64_t> a(n), b(n);
    for (auto &w : a) w = rng();
    for (auto &w : b) w = rng();

    auto a1 = a, a2 = a;
    scalar.or_into(a1.data(), b.data(), n);
    active.or_into(a2.data(), b.data(), n);
    CHECK(a1 == a2);
    if (avx2) {
      auto a3 = a;
      avx2->or_into(a3.data(), b.data(), n);
      CHECK(a1 == a3);
    }

    std::vector<std::uint64_t> d1(n), d2(n), d3(n);
    scalar.andnot_into(d1.data(), a.data(), b.data(), n);
    active.andnot_into(d2.data(), a.data(), b.data(), n);
    CHECK(d1 == d2);
    if (avx2) {
      avx2->andnot_into(d3.data(), a.data(), b.data(), n);
      CHECK(d1 == d3);
    }
  }
}

TEST_CASE("or_with matches naive bit loop") {
  std::mt19937_64 rng(43);
  for (int iter = 0; iter < 50; ++iter) {
    std::uniform_int_distribution<std::size_t> nd(1, 300);
    std::size_t n = nd(rng);
    Bitset x(n), y(n);
    std::vector<bool> ref(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() & 1) {
        x.set(i);
        ref[i] = true;
      }
      if (rng() & 2) {
        y.set(i);
        ref[i] = ref[i] || true;
      }
    }
    x.or_with(y);
    for (std::size_t i = 0; i < n; ++i) CHECK(x.test(i) == ref[i]);
  }
}
