#pragma once

// Sampled functions on the unit torus and Fourier-multiplier operators.
// A grid function holds n = 2^m real samples at the points j/n; a multiplier
// operator is a bounded symbol on the integer frequencies |k| <= n/2 and is
// applied spectrally, which is exact for band-limited inputs.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/fft.hpp"

namespace sparsedom {

struct GridFunction {
  std::vector<double> v;  // samples at j/n

  GridFunction() = default;
  explicit GridFunction(std::size_t n, double fill = 0.0) : v(n, fill) {}
  explicit GridFunction(std::vector<double> values) : v(std::move(values)) {}

  std::size_t size() const { return v.size(); }
  double h() const { return 1.0 / static_cast<double>(v.size()); }
  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }

  double mean() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  // Riemann L^s norm (1/n sum |v|^s)^{1/s}.
  double lp_norm(double s) const {
    if (std::isinf(s)) return max_abs();
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::fabs(x), s);
    return std::pow(acc / static_cast<double>(v.size()), 1.0 / s);
  }
  double l2_norm() const {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  }

  GridFunction& subtract_mean() {
    const double m = mean();
    for (double& x : v) x -= m;
    return *this;
  }
};

struct MultiplierOperator {
  std::string name;
  std::function<cplx(std::int64_t)> symbol;
};

inline std::vector<cplx> spectrum(const GridFunction& f) {
  std::vector<cplx> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = f.v[i];
  fft_inplace(a, /*inverse=*/false);
  return a;
}

// Multiplies the spectrum by the symbol and transforms back; bin j carries
// frequency j for j <= n/2 and j - n above.
inline GridFunction synthesize(std::vector<cplx> spec,
                               const MultiplierOperator& op) {
  const std::size_t n = spec.size();
  const auto half = static_cast<std::int64_t>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    const std::int64_t k = (jj <= half) ? jj : jj - static_cast<std::int64_t>(n);
    spec[j] *= op.symbol(k);
  }
  fft_inplace(spec, /*inverse=*/true);
  GridFunction out(n);
  for (std::size_t i = 0; i < n; ++i) out.v[i] = spec[i].real();
  return out;
}

inline GridFunction apply(const MultiplierOperator& op, const GridFunction& f) {
  if (f.size() == 0) {
    throw std::invalid_argument("apply: empty grid function");
  }
  return synthesize(spectrum(f), op);
}

inline MultiplierOperator compose(const MultiplierOperator& a,
                                  const MultiplierOperator& b) {
  return MultiplierOperator{
      a.name + "*" + b.name,
      [sa = a.symbol, sb = b.symbol](std::int64_t k) { return sa(k) * sb(k); }};
}

// f restricted to I (cells outside are zeroed); I should be aligned with the
// grid or at least dyadic, cells are kept when their centre lies in I.
inline GridFunction restrict_to(const GridFunction& f, const Interval& I) {
  GridFunction out(f.size());
  const double h = f.h();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double centre = (static_cast<double>(i) + 0.5) * h;
    if (I.contains(centre)) out.v[i] = f.v[i];
  }
  return out;
}

}  // namespace sparsedom
