#pragma once

#include <algorithm>
#include <cstddef>
#include <new>
#include <string>
#include <vector>

#include "augbench/error.hpp"

namespace augbench::nn {

// Fixed 64-byte alignment: vectorised kernels peel differently on differently
// aligned buffers, which would make float results depend on the heap layout.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Dense NCHW tensor.
template <typename T>
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  AlignedVector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }

  T* sample(int i) { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  const T* sample(int i) const { return data.data() + static_cast<std::size_t>(i) * sample_size(); }

  T& at(int i, int ch, int y, int x) {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  T at(int i, int ch, int y, int x) const {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }

  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

  std::string shape_string() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + ")";
  }
};

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w) {
    throw ValidationError("concat_channels: shape mismatch " + a.shape_string() + " vs " +
                          b.shape_string());
  }
  Tensor<T> out(a.n, a.c + b.c, a.h, a.w);
  for (int i = 0; i < a.n; ++i) {
    T* dst = out.sample(i);
    std::copy(a.sample(i), a.sample(i) + a.sample_size(), dst);
    std::copy(b.sample(i), b.sample(i) + b.sample_size(), dst + a.sample_size());
  }
  return out;
}

/// Inverse of concat_channels for gradients: first `channels` go to `first`.
template <typename T>
void split_channels(const Tensor<T>& src, int channels, Tensor<T>& first, Tensor<T>& second) {
  first = Tensor<T>(src.n, channels, src.h, src.w);
  second = Tensor<T>(src.n, src.c - channels, src.h, src.w);
  for (int i = 0; i < src.n; ++i) {
    const T* s = src.sample(i);
    std::copy(s, s + first.sample_size(), first.sample(i));
    std::copy(s + first.sample_size(), s + src.sample_size(), second.sample(i));
  }
}

template <typename T>
void add_into(Tensor<T>& acc, const Tensor<T>& g) {
  if (acc.data.empty()) {
    acc = g;
    return;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += g.data[i];
}

}  // namespace augbench::nn
