#pragma once

#include <cstdint>
#include <cstring>
#include <type_traits>
#include <utility>

namespace pairsamp {

// Vector with N inline slots, spilling to the heap beyond that. Watch lists
// are mostly tiny, so this keeps the per-literal footprint flat. T must be
// trivially copyable.
template <typename T, unsigned N>
class InlineVec {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  InlineVec() = default;
  InlineVec(const InlineVec &) = delete;
  InlineVec &operator=(const InlineVec &) = delete;

  InlineVec(InlineVec &&o) noexcept { steal(o); }
  InlineVec &operator=(InlineVec &&o) noexcept {
    if (this != &o) {
      delete[] heap_;
      steal(o);
    }
    return *this;
  }
  ~InlineVec() { delete[] heap_; }

  std::uint32_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  T *begin() { return data(); }
  T *end() { return data() + size_; }
  const T *begin() const { return data(); }
  const T *end() const { return data() + size_; }
  T &operator[](std::uint32_t i) { return data()[i]; }
  const T &operator[](std::uint32_t i) const { return data()[i]; }

  void push_back(const T &v) {
    if (size_ == cap_) grow();
    data()[size_++] = v;
  }

  // Order-destroying erase.
  void erase_swap(std::uint32_t i) {
    T *d = data();
    d[i] = d[--size_];
  }

  void clear() { size_ = 0; }

 private:
  T *data() { return heap_ ? heap_ : inline_; }
  const T *data() const { return heap_ ? heap_ : inline_; }

  void grow() {
    std::uint32_t ncap = cap_ * 2;
    T *nheap = new T[ncap];
    std::memcpy(nheap, data(), size_ * sizeof(T));
    delete[] heap_;
    heap_ = nheap;
    cap_ = ncap;
  }

  void steal(InlineVec &o) {
    size_ = o.size_;
    cap_ = o.cap_;
    heap_ = o.heap_;
    if (!o.heap_) std::memcpy(inline_, o.inline_, size_ * sizeof(T));
    o.heap_ = nullptr;
    o.size_ = 0;
    o.cap_ = N;
  }

  T inline_[N];
  T *heap_ = nullptr;
  std::uint32_t size_ = 0;
  std::uint32_t cap_ = N;
};

}  // namespace pairsamp
