#pragma once

// Asymptotic experiment drivers. Each sweep drives a family of power-law
// inputs and critical power weights by a parameter eps -> 0, collects both
// sides of the sparse-bound inequality in exact closed form, and fits
// log-log slopes. The lower range p <= frak_p uses
//
//   f_eps = x^{-1/p0 + eps},  g_eps = x^{-1/p0' + eps},
//   w_eps = x^{p/p0 - 1 - eps}   (critical for A_{p/p0}),
//
// and the upper range p >= frak_p the dual family
//
//   F = x^{-1/q0 + eps} in the p0-slot,  G = x^{-1/q0' + eps},
//   w_eps = x^{-1/(q0/p)' + (p-1) eps}   (critical for RH_{(q0/p)'}).
//
// All norms and form values come from antiderivatives, so no grid
// discretization enters the slope fits.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/exponents.hpp"
#include "sparsedom/sparse.hpp"
#include "sparsedom/weights.hpp"

namespace sparsedom {

struct SlopeFit {
  std::vector<double> eps;     // sweep values, decreasing
  std::vector<double> values;  // measured quantity per eps
  std::size_t dropped = 0;     // points removed at the large-eps end
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline SlopeFit fit_loglog(std::vector<double> eps, std::vector<double> values,
                           std::size_t drop_largest = 0) {
  if (eps.size() != values.size() || eps.size() < drop_largest + 2) {
    throw std::invalid_argument("fit_loglog: need at least two fit points");
  }
  SlopeFit fit;
  fit.eps = std::move(eps);
  fit.values = std::move(values);
  fit.dropped = drop_largest;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = drop_largest; i < fit.eps.size(); ++i) {
    const double x = std::log(fit.eps[i]);
    const double y = std::log(fit.values[i]);
    if (!std::isfinite(y)) {
      throw std::domain_error("fit_loglog: non-finite sweep value");
    }
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++count;
  }
  const double cnt = static_cast<double>(count);
  fit.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / cnt;
  const double ss_tot = syy - sy * sy / cnt;
  double ss_res = 0.0;
  for (std::size_t i = drop_largest; i < fit.eps.size(); ++i) {
    const double x = std::log(fit.eps[i]);
    const double y = std::log(fit.values[i]);
    const double d = y - (fit.intercept + fit.slope * x);
    ss_res += d * d;
  }
  fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// Default sweep 2^{-4} .. 2^{-14}; the two largest values sit in the
// pre-asymptotic regime and are dropped from fits.
inline std::vector<double> default_eps_grid(int k_min = 4, int k_max = 14) {
  std::vector<double> eps;
  for (int k = k_min; k <= k_max; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

namespace detail {

// || x^{af} ||_{L^s_w} for w = x^{aw} on [0,1], by antiderivative.
inline double power_weighted_norm(double af, double aw, double s) {
  const double e = s * af + aw;
  if (e <= -1.0) return kInf;
  return std::pow(1.0 / (e + 1.0), 1.0 / s);
}

inline void check_eps_grid(const std::vector<double>& eps) {
  if (eps.size() < 6) {
    throw std::invalid_argument("sharpness: need at least 6 sweep points");
  }
  double lo = kInf, hi = 0.0;
  for (double e : eps) {
    if (!(e > 0.0) || e > 0.1 + 1e-12) {
      throw std::invalid_argument("sharpness: eps must lie in (0, 0.1]");
    }
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi / lo < 100.0) {
    throw std::invalid_argument("sharpness: sweep must span two decades");
  }
}

}  // namespace detail

struct SharpnessResult {
  SlopeFit lhs;        // canonical-collection form value
  SlopeFit rhs;        // characteristic^alpha * norm product
  double ratio_min = kInf;
  double ratio_max = 0.0;
};

// Lower range p in (p0, frak_p]: both sides decay like eps^{-(1 + 1/p0)}.
inline SharpnessResult sharpness_lower(const ExponentConfig& cfg,
                                       const std::vector<double>& eps,
                                       std::size_t drop_largest = 2) {
  if (cfg.p > cfg.frak_p + 1e-12) {
    throw ConfigError("sharpness_lower: requires p <= critical exponent");
  }
  detail::check_eps_grid(eps);
  const auto family = default_interval_family();
  std::vector<double> lhs_vals, rhs_vals;
  SharpnessResult out;
  for (double e : eps) {
    const double af = -1.0 / cfg.p0 + e;
    const double ag = -1.0 / cfg.p0_conj + e;
    const double lhs = canonical_form_closed(af, ag, cfg);
    const double aw = cfg.p / cfg.p0 - 1.0 - e;
    const Weight w = Weight::power(aw);
    const double chr = combined_characteristic(w, cfg, family);
    const double fn = detail::power_weighted_norm(af, aw, cfg.p);
    const double gn = detail::power_weighted_norm(
        ag, aw * (1.0 - cfg.p_conj), cfg.p_conj);
    const double rhs = std::pow(chr, cfg.alpha) * fn * gn;
    lhs_vals.push_back(lhs);
    rhs_vals.push_back(rhs);
    const double ratio = lhs / rhs;
    out.ratio_min = std::min(out.ratio_min, ratio);
    out.ratio_max = std::max(out.ratio_max, ratio);
  }
  out.lhs = fit_loglog(std::vector<double>(eps), std::move(lhs_vals),
                       drop_largest);
  out.rhs = fit_loglog(std::vector<double>(eps), std::move(rhs_vals),
                       drop_largest);
  return out;
}

// Upper range p in [frak_p, q0): both sides decay like eps^{-(1 + 1/q0')}.
inline SharpnessResult sharpness_upper(const ExponentConfig& cfg,
                                       const std::vector<double>& eps,
                                       std::size_t drop_largest = 2) {
  if (cfg.p < cfg.frak_p - 1e-12) {
    throw ConfigError("sharpness_upper: requires p >= critical exponent");
  }
  detail::check_eps_grid(eps);
  const auto family = default_interval_family();
  std::vector<double> lhs_vals, rhs_vals;
  SharpnessResult out;
  const double inv_q0 = std::isinf(cfg.q0) ? 0.0 : 1.0 / cfg.q0;
  for (double e : eps) {
    const double af = -inv_q0 + e;            // p0-slot input
    const double ag = -1.0 / cfg.q0_conj + e;  // q0'-slot input
    const double lhs = canonical_form_closed(af, ag, cfg);
    const double aw = -1.0 / cfg.q0_over_p_conj + (cfg.p - 1.0) * e;
    const Weight w = Weight::power(aw);
    const double chr = combined_characteristic(w, cfg, family);
    const double fn = detail::power_weighted_norm(af, aw, cfg.p);
    const double gn = detail::power_weighted_norm(
        ag, aw * (1.0 - cfg.p_conj), cfg.p_conj);
    const double rhs = std::pow(chr, cfg.alpha) * fn * gn;
    lhs_vals.push_back(lhs);
    rhs_vals.push_back(rhs);
    const double ratio = lhs / rhs;
    out.ratio_min = std::min(out.ratio_min, ratio);
    out.ratio_max = std::max(out.ratio_max, ratio);
  }
  out.lhs = fit_loglog(std::vector<double>(eps), std::move(lhs_vals),
                       drop_largest);
  out.rhs = fit_loglog(std::vector<double>(eps), std::move(rhs_vals),
                       drop_largest);
  return out;
}

struct BoundScanRow {
  double eps = 0.0;
  double bound = 0.0;           // best bank ratio form/(|f| |g|)
  double characteristic = 0.0;  // joint characteristic of the weight
  double normalized = 0.0;      // bound / characteristic^exponent
  int excluded_pairs = 0;       // bank pairs skipped for divergent norms
};

// Scans the sparse bound over the critical weight family: for each eps the
// best ratio of the (infinite) canonical-collection form against the
// weighted norms over a bank of power pairs, normalized by the joint
// characteristic to a chosen power. With the sharp power the rows stay in a
// fixed window; lowering the power makes them grow as eps -> 0.
inline std::vector<BoundScanRow> weighted_bound_scan(
    const ExponentConfig& cfg, const std::vector<double>& eps,
    double exponent) {
  const auto family = default_interval_family();
  const bool lower = cfg.p <= cfg.frak_p;
  const double inv_q0 = std::isinf(cfg.q0) ? 0.0 : 1.0 / cfg.q0;
  std::vector<BoundScanRow> rows;
  for (double e : eps) {
    BoundScanRow row;
    row.eps = e;
    const double aw = lower ? (cfg.p / cfg.p0 - 1.0 - e)
                            : (-1.0 / cfg.q0_over_p_conj + (cfg.p - 1.0) * e);
    const Weight w = Weight::power(aw);
    row.characteristic = combined_characteristic(w, cfg, family);
    const double ext_f = lower ? (-1.0 / cfg.p0 + e) : (-inv_q0 + e);
    const double ext_g =
        lower ? (-1.0 / cfg.p0_conj + e) : (-1.0 / cfg.q0_conj + e);
    const std::vector<std::pair<double, double>> bank = {
        {ext_f, ext_g}, {0.0, 0.0}, {0.2, 0.2}, {ext_f, 0.0}};
    for (const auto& [af, ag] : bank) {
      const double form = canonical_form_closed(af, ag, cfg);
      const double fn = detail::power_weighted_norm(af, aw, cfg.p);
      const double gn = detail::power_weighted_norm(
          ag, aw * (1.0 - cfg.p_conj), cfg.p_conj);
      if (!std::isfinite(form) || !std::isfinite(fn) || !std::isfinite(gn)) {
        row.excluded_pairs += 1;
        continue;
      }
      row.bound = std::max(row.bound, form / (fn * gn));
    }
    row.normalized = row.bound / std::pow(row.characteristic, exponent);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sparsedom
