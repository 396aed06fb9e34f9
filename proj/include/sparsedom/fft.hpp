#pragma once

// Iterative radix-2 FFT with cached twiddle tables. Sizes must be powers of
// two.

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace sparsedom {

using cplx = std::complex<double>;

namespace detail {

inline const std::vector<cplx>& twiddle_table(std::size_t n) {
  static std::unordered_map<std::size_t, std::vector<cplx>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<cplx> tw(n / 2);
    const double step = -2.0 * M_PI / static_cast<double>(n);
    for (std::size_t i = 0; i < n / 2; ++i) {
      tw[i] = {std::cos(step * static_cast<double>(i)),
               std::sin(step * static_cast<double>(i))};
    }
    it = cache.emplace(n, std::move(tw)).first;
  }
  return it->second;
}

}  // namespace detail

inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = detail::twiddle_table(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx w = tw[k * step];
        if (inverse) w = std::conj(w);
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

}  // namespace sparsedom
