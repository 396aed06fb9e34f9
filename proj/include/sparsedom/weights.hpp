#pragma once

// Weights on [0,1] and their Muckenhoupt / reverse Hoelder characteristics.
//
// Two representations are supported. A power weight x -> x^a carries exact
// interval averages through the antiderivative
//
//   avg_{[u,v]} x^{sa} = (v^{sa+1} - u^{sa+1}) / ((sa+1)(v-u));
//
// quadrature never enters. A sampled weight is piecewise constant on a
// uniform grid of [0,1] and all of its averages are grid-exact.
//
// Characteristic suprema are taken over an interval family combining the
// cubes of both dyadic systems down to a fixed depth with the geometric
// family [0, 2^{-n}] reaching far deeper; for power weights the supremum
// lives on the intervals touching the origin and the geometric tail
// captures it.
//
// The derived-weight algebra used by the sharp sparse bound is implemented
// exactly on power weights (exponent arithmetic) and pointwise on sampled
// ones:
//
//   sigma = w^{1-p'},  u = sigma^{(p0'/p')'},  v = w^{(q0/p)'},
//   varpi = sigma v^{p'/q0'},  rho = w u^{p/p0},
//
// with the identities u = v^{1-r'} and u^{-beta} varpi^{1/p'} rho^{1/p} = 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/dyadic.hpp"
#include "sparsedom/exponents.hpp"

namespace sparsedom {

class Weight {
 public:
  // x -> x^a on [0,1]; integrable there iff a > -1. Averages of
  // non-integrable powers over intervals touching 0 return +inf.
  static Weight power(double a) { return Weight(Power{a}); }

  // Strictly positive values on the uniform grid of [0,1], one value per
  // cell [i/n, (i+1)/n).
  static Weight sampled(std::vector<double> values) {
    if (values.empty()) {
      throw std::invalid_argument("Weight::sampled: empty grid");
    }
    for (double x : values) {
      if (!(x > 0.0)) {
        throw std::invalid_argument("Weight::sampled: values must be > 0");
      }
    }
    return Weight(Sampled{std::move(values)});
  }

  bool is_power() const { return std::holds_alternative<Power>(rep_); }
  double power_exponent() const { return std::get<Power>(rep_).a; }
  const std::vector<double>& values() const {
    return std::get<Sampled>(rep_).v;
  }
  std::size_t grid_size() const {
    return is_power() ? 0 : values().size();
  }

  double value_at(double x) const {
    if (is_power()) return std::pow(x, power_exponent());
    const auto& v = values();
    const auto n = static_cast<double>(v.size());
    auto i = static_cast<std::size_t>(std::min(
        n - 1.0, std::max(0.0, std::floor(x * n))));
    return v[i];
  }

  // integral_pow(I, s) = \int_I w^s; average_pow divides by |I|. Exact for
  // both representations, +inf where the integral diverges.
  double integral_pow(const Interval& I, double s) const {
    check_domain(I);
    if (I.empty()) return 0.0;
    if (is_power()) {
      return power_integral(power_exponent() * s, I.left, I.right);
    }
    const auto& v = values();
    const auto n = static_cast<double>(v.size());
    const double lo = I.left * n;
    const double hi = I.right * n;
    const auto ilo = static_cast<std::size_t>(std::floor(lo));
    const auto ihi = static_cast<std::size_t>(
        std::min(n - 1.0, std::floor(hi)));
    double total = 0.0;
    for (std::size_t i = ilo; i <= ihi; ++i) {
      const double cell_lo = std::max(lo, static_cast<double>(i));
      const double cell_hi = std::min(hi, static_cast<double>(i + 1));
      if (cell_hi > cell_lo) {
        total += std::pow(v[i], s) * (cell_hi - cell_lo);
      }
    }
    return total / n;
  }

  double average_pow(const Interval& I, double s) const {
    if (I.empty()) {
      throw std::invalid_argument("Weight::average_pow: empty interval");
    }
    return integral_pow(I, s) / I.length();
  }

  double measure(const Interval& I) const { return integral_pow(I, 1.0); }

  double ess_sup(const Interval& I) const {
    check_domain(I);
    if (is_power()) {
      const double a = power_exponent();
      if (a >= 0.0) return std::pow(I.right, a);
      if (I.left <= 0.0) return kInf;
      return std::pow(I.left, a);
    }
    return range_extreme(I, /*want_max=*/true);
  }

  double ess_inf(const Interval& I) const {
    check_domain(I);
    if (is_power()) {
      const double a = power_exponent();
      if (a >= 0.0) return std::pow(I.left, a);
      return std::pow(I.right, a);
    }
    return range_extreme(I, /*want_max=*/false);
  }

  Weight pow(double e) const {
    if (is_power()) return power(power_exponent() * e);
    std::vector<double> v = values();
    for (double& x : v) x = std::pow(x, e);
    return sampled(std::move(v));
  }

  Weight times(const Weight& other) const {
    if (is_power() && other.is_power()) {
      return power(power_exponent() + other.power_exponent());
    }
    if (!is_power() && !other.is_power() &&
        values().size() == other.values().size()) {
      std::vector<double> v = values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= other.values()[i];
      return sampled(std::move(v));
    }
    throw std::invalid_argument("Weight::times: incompatible representations");
  }

 private:
  struct Power {
    double a;
  };
  struct Sampled {
    std::vector<double> v;
  };

  explicit Weight(Power p) : rep_(p) {}
  explicit Weight(Sampled s) : rep_(std::move(s)) {}

  static void check_domain(const Interval& I) {
    if (I.left < -1e-12 || I.right > 1.0 + 1e-12) {
      throw std::domain_error("Weight: interval escapes [0,1]");
    }
  }

  // \int_u^v x^e dx with divergence sentinel at the origin.
  static double power_integral(double e, double u, double v) {
    u = std::max(u, 0.0);
    if (v <= u) return 0.0;
    if (std::fabs(e) < 1e-15) return v - u;
    if (u == 0.0) {
      if (e <= -1.0) return kInf;
      return std::pow(v, e + 1.0) / (e + 1.0);
    }
    if (std::fabs(e + 1.0) < 1e-13) return std::log(v / u);
    return (std::pow(v, e + 1.0) - std::pow(u, e + 1.0)) / (e + 1.0);
  }

  double range_extreme(const Interval& I, bool want_max) const {
    const auto& v = values();
    const auto n = static_cast<double>(v.size());
    auto ilo = static_cast<std::size_t>(std::max(0.0, std::floor(I.left * n)));
    auto ihi = static_cast<std::size_t>(
        std::min(n - 1.0, std::ceil(I.right * n) - 1.0));
    double best = v[ilo];
    for (std::size_t i = ilo; i <= ihi; ++i) {
      best = want_max ? std::max(best, v[i]) : std::min(best, v[i]);
    }
    return best;
  }

  std::variant<Power, Sampled> rep_;
};

// Fixed-exponent averager: O(1) queries against a prefix table for sampled
// weights, pass-through for power weights.
class PowAverager {
 public:
  PowAverager(const Weight& w, double s) : w_(&w), s_(s) {
    if (!w.is_power()) {
      const auto& v = w.values();
      const auto n = static_cast<double>(v.size());
      prefix_.resize(v.size() + 1, 0.0);
      for (std::size_t i = 0; i < v.size(); ++i) {
        prefix_[i + 1] = prefix_[i] + std::pow(v[i], s) / n;
      }
    }
  }

  double average(const Interval& I) const {
    if (w_->is_power()) return w_->average_pow(I, s_);
    return (integral_to(I.right) - integral_to(I.left)) / I.length();
  }

 private:
  double integral_to(double x) const {
    const auto& v = w_->values();
    const auto n = static_cast<double>(v.size());
    x = std::min(1.0, std::max(0.0, x));
    const double pos = x * n;
    auto i = static_cast<std::size_t>(std::min(n - 1.0, std::floor(pos)));
    return prefix_[i] + std::pow(v[i], s_) * (pos - static_cast<double>(i)) / n;
  }

  const Weight* w_;
  double s_;
  std::vector<double> prefix_;
};

// Interval family for characteristic suprema: both dyadic systems down to
// `exhaustive_depth` intersected with [0,1], plus the geometric family
// [0, 2^{-n}] for n <= geometric_depth.
inline std::vector<Interval> default_interval_family(int exhaustive_depth = 12,
                                                     int geometric_depth = 60) {
  std::vector<Interval> fam;
  const Interval unit = unit_interval();
  for (int b = 0; b < 2; ++b) {
    for (int k = 0; k <= exhaustive_depth; ++k) {
      DyadicCube q = cube_containing(b, k, 0.0);
      for (; q.left() < 1.0; ++q.index) {
        const Interval cut = q.interval().intersect(unit);
        if (cut.length() > 1e-15) fam.push_back(cut);
      }
    }
  }
  for (int n = exhaustive_depth + 1; n <= geometric_depth; ++n) {
    fam.push_back({0.0, std::ldexp(1.0, -n)});
  }
  return fam;
}

struct CharacteristicReport {
  double value = 1.0;
  Interval witness{0.0, 1.0};
  std::string family;
};

// A_p characteristic sup_I <w>_I <w^{1-p'}>_I^{p-1}; at p = 1 the dual
// average degenerates to 1/essinf.
inline CharacteristicReport ap_characteristic(
    const Weight& w, double p, const std::vector<Interval>& family) {
  if (family.empty()) {
    throw std::invalid_argument("ap_characteristic: empty family");
  }
  if (!(p >= 1.0)) {
    throw std::domain_error("ap_characteristic: need p >= 1");
  }
  CharacteristicReport rep;
  rep.value = 0.0;
  rep.family = "intervals[" + std::to_string(family.size()) + "]";
  const PowAverager plain(w, 1.0);
  if (p == 1.0) {
    for (const Interval& I : family) {
      const double q = plain.average(I) / w.ess_inf(I);
      if (q > rep.value) {
        rep.value = q;
        rep.witness = I;
        if (std::isinf(q)) break;
      }
    }
    return rep;
  }
  const double pc = conjugate(p);
  const PowAverager dual(w, 1.0 - pc);
  for (const Interval& I : family) {
    const double q =
        plain.average(I) * std::pow(dual.average(I), p - 1.0);
    if (q > rep.value) {
      rep.value = q;
      rep.witness = I;
      if (std::isinf(q)) break;
    }
  }
  return rep;
}

// RH_q characteristic sup_I <w^q>_I^{1/q} / <w>_I, with the essential-sup
// convention at q = inf. RH_1 is identically 1.
inline CharacteristicReport rh_characteristic(
    const Weight& w, double q, const std::vector<Interval>& family) {
  if (family.empty()) {
    throw std::invalid_argument("rh_characteristic: empty family");
  }
  if (!(q >= 1.0)) {
    throw std::domain_error("rh_characteristic: need q >= 1");
  }
  CharacteristicReport rep;
  rep.value = 0.0;
  rep.family = "intervals[" + std::to_string(family.size()) + "]";
  if (q == 1.0) {
    rep.value = 1.0;
    rep.witness = family.front();
    return rep;
  }
  const PowAverager plain(w, 1.0);
  const bool use_sup = std::isinf(q);
  PowAverager powq(w, use_sup ? 1.0 : q);
  for (const Interval& I : family) {
    const double num =
        use_sup ? w.ess_sup(I) : std::pow(powq.average(I), 1.0 / q);
    const double val = num / plain.average(I);
    if (val > rep.value) {
      rep.value = val;
      rep.witness = I;
      if (std::isinf(val)) break;
    }
  }
  return rep;
}

// Joint characteristic [w]_{A_{p/p0}} [w]_{RH_{(q0/p)'}} over one family.
inline double combined_characteristic(const Weight& w,
                                      const ExponentConfig& cfg,
                                      const std::vector<Interval>& family) {
  const double ap = ap_characteristic(w, cfg.p / cfg.p0, family).value;
  const double rh = rh_characteristic(w, cfg.q0_over_p_conj, family).value;
  return ap * rh;
}

// sigma = w^{1-p'}; per interval the A_{p'} quantity of sigma equals the
// A_p quantity of w raised to p'-1, so the characteristics satisfy
// [sigma]_{A_{p'}} = [w]_{A_p}^{p'-1} over any family.
inline Weight dual_weight(const Weight& w, double p) {
  if (!(p > 1.0)) throw std::domain_error("dual_weight: need p > 1");
  return w.pow(1.0 - conjugate(p));
}

struct DerivedWeights {
  Weight sigma;
  Weight u;
  Weight v;
  Weight varpi;
  Weight rho;
};

inline DerivedWeights derived_weights(const Weight& w,
                                      const ExponentConfig& cfg) {
  const double pc = cfg.p_conj;
  Weight sigma = w.pow(1.0 - pc);
  // (p0'/p')': p0' = inf collapses the ratio to inf, whose conjugate is 1.
  double u_exp;
  if (std::isinf(cfg.p0_conj)) {
    u_exp = 1.0;
  } else {
    u_exp = conjugate(cfg.p0_conj / pc);
  }
  Weight u = sigma.pow(u_exp);
  Weight v = w.pow(cfg.q0_over_p_conj);
  Weight varpi = sigma.times(v.pow(pc / cfg.q0_conj));
  Weight rho = w.times(u.pow(cfg.p / cfg.p0));
  return DerivedWeights{std::move(sigma), std::move(u), std::move(v),
                        std::move(varpi), std::move(rho)};
}

struct JnReport {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Checks [w^s]_{A_{s(q-1)+1}} <= [w]_{A_q}^s [w]_{RH_s}^s over the family.
inline JnReport jn_inequality_report(const Weight& w, double q, double s,
                                     const std::vector<Interval>& family) {
  if (!(q >= 1.0) || !(s >= 1.0)) {
    throw std::domain_error("jn_inequality: need q >= 1 and s >= 1");
  }
  JnReport rep;
  rep.lhs = ap_characteristic(w.pow(s), s * (q - 1.0) + 1.0, family).value;
  rep.rhs = std::pow(ap_characteristic(w, q, family).value, s) *
            std::pow(rh_characteristic(w, s, family).value, s);
  rep.holds = std::isfinite(rep.lhs) && std::isfinite(rep.rhs) &&
              rep.lhs <= rep.rhs * (1.0 + 1e-9);
  return rep;
}

inline bool jn_inequality_check(const Weight& w, double q, double s,
                                const std::vector<Interval>& family) {
  return jn_inequality_report(w, q, s, family).holds;
}

}  // namespace sparsedom
