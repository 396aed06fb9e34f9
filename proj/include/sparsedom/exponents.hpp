#pragma once

// Exponent algebra for the sharp weighted bounds. A configuration fixes the
// off-diagonal range (p0, q0) with 1 <= p0 < 2 < q0 <= inf and an operating
// exponent p strictly between them; everything else is derived:
//
//   frak_p = 1 + p0/q0'              branch point of the sharp power
//   r      = (q0/p)' (p/p0 - 1) + 1
//   delta  = min{q0', p0 (r-1)}
//   alpha  = (q0/p)'/delta = max{1/(p-p0), (q0-1)/(q0-p)}
//   beta   = 1/p0 - (r-1)/q0'        sign flips exactly at p = frak_p
//   gamma  = 1/(1-beta)
//
// q0 = inf is a first-class value with the limit conventions q0' = 1,
// (q0/p)' = 1 and (q0-1)/(q0-p) = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsedom/base.hpp"

namespace sparsedom {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Hoelder conjugate: 1/e + 1/e' = 1, with conjugate(1) = inf and
// conjugate(inf) = 1.
inline double conjugate(double e) {
  if (!(e >= 1.0)) {
    throw std::domain_error("conjugate: exponent must satisfy e >= 1");
  }
  if (std::isinf(e)) return 1.0;
  if (e == 1.0) return kInf;
  return e / (e - 1.0);
}

namespace detail {
inline void check_range(double p0, double q0) {
  if (!(1.0 <= p0)) throw ConfigError("exponent range violated: 1 <= p0");
  if (!(p0 < 2.0)) throw ConfigError("exponent range violated: p0 < 2");
  if (!(2.0 < q0)) throw ConfigError("exponent range violated: 2 < q0");
}
}  // namespace detail

inline double critical_exponent(double p0, double q0) {
  detail::check_range(p0, q0);
  return 1.0 + p0 / conjugate(q0);
}

// The max-form of the sharp power, evaluated without going through delta.
inline double alpha_branch_max(double p0, double q0, double p) {
  const double upper = std::isinf(q0) ? 1.0 : (q0 - 1.0) / (q0 - p);
  return std::max(1.0 / (p - p0), upper);
}

struct ExponentConfig {
  double p0 = 1.0;
  double q0 = kInf;
  double p = 2.0;

  double p0_conj = kInf;
  double q0_conj = 1.0;
  double p_conj = 2.0;

  double frak_p = 2.0;          // branch point of alpha
  double q0_over_p_conj = 1.0;  // (q0/p)'
  double r = 2.0;
  double delta = 1.0;
  double alpha = 1.0;
  double beta = 0.0;
  double beta_bar = 0.0;
  double gamma = 1.0;
};

inline ExponentConfig make_config(double p0, double q0, double p) {
  detail::check_range(p0, q0);
  if (!(p0 < p)) throw ConfigError("exponent range violated: p0 < p");
  if (!(p < q0)) throw ConfigError("exponent range violated: p < q0");

  ExponentConfig c;
  c.p0 = p0;
  c.q0 = q0;
  c.p = p;
  c.p0_conj = conjugate(p0);
  c.q0_conj = conjugate(q0);
  c.p_conj = conjugate(p);
  c.frak_p = 1.0 + p0 / c.q0_conj;
  c.q0_over_p_conj = std::isinf(q0) ? 1.0 : conjugate(q0 / p);
  c.r = c.q0_over_p_conj * (p / p0 - 1.0) + 1.0;
  c.delta = std::min(c.q0_conj, p0 * (c.r - 1.0));
  c.alpha = c.q0_over_p_conj / c.delta;
  c.beta = 1.0 / p0 - (c.r - 1.0) / c.q0_conj;
  // Lower-branch quantity 1/q0' - 1/(p0(r-1)); algebraically -beta/(r-1).
  c.beta_bar = 1.0 / c.q0_conj - 1.0 / (p0 * (c.r - 1.0));
  c.gamma = 1.0 / (1.0 - c.beta);
  return c;
}

}  // namespace sparsedom
