#pragma once

// Spectral model on the unit torus. The generator L is minus the second
// derivative, with eigenvalues lambda_k = (2 pi k)^2; the heat semigroup,
// the normalized high-pass blocks
//
//   Q_t^{(N)} : profile (t lambda)^N e^{-t lambda} / Gamma(N),
//
// their tail integrals
//
//   P_t^{(N)} : profile Gamma(N, t lambda) / Gamma(N),
//
// and the Hilbert transform (symbol -i sgn k) are all Fourier multipliers.
// The constant mode is in the kernel of L, so Q and P assign it symbol 0 and
// all reproducing-formula checks operate on mean-zero functions.
//
// Alongside the multipliers, this header carries the maximal operators of
// the dyadic machinery: the Hardy-Littlewood variant over both shifted
// systems, the weighted dyadic maximal function, the inf-over-cubes
// regularization that agrees with it cell-exactly, and the frequency-
// truncated maximal operator built from P^{(N)} at the scale of each cube.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/dyadic.hpp"
#include "sparsedom/exponents.hpp"
#include "sparsedom/grid.hpp"
#include "sparsedom/special.hpp"
#include "sparsedom/weights.hpp"

namespace sparsedom {

inline double eigenvalue(std::int64_t k) {
  const double w = 2.0 * M_PI * static_cast<double>(k);
  return w * w;
}

// Spectral profile of Q^{(N)}: x^N e^{-x} / Gamma(N).
inline double q_profile(double N, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp(N * std::log(x) - x - std::lgamma(N));
}

// Spectral profile of P^{(N)}: the regularized upper incomplete gamma.
inline double p_profile(double N, double x) {
  if (x <= 0.0) return 1.0;
  if (x > 2000.0 && x > 10.0 * N) return 0.0;
  return reg_gamma_upper(N, x);
}

inline MultiplierOperator identity_op() {
  return {"id", [](std::int64_t) { return cplx{1.0, 0.0}; }};
}

inline MultiplierOperator zero_op() {
  return {"zero", [](std::int64_t) { return cplx{0.0, 0.0}; }};
}

inline MultiplierOperator heat_op(double t) {
  if (!(t >= 0.0)) throw std::domain_error("heat_op: t >= 0");
  return {"heat", [t](std::int64_t k) {
            return cplx{std::exp(-t * eigenvalue(k)), 0.0};
          }};
}

inline MultiplierOperator q_op(double N, double t) {
  if (!(N > 0.0) || !(t > 0.0)) throw std::domain_error("q_op: N, t > 0");
  return {"Q", [N, t](std::int64_t k) {
            if (k == 0) return cplx{0.0, 0.0};
            return cplx{q_profile(N, t * eigenvalue(k)), 0.0};
          }};
}

inline MultiplierOperator p_op(double N, double t) {
  if (!(N > 0.0) || !(t > 0.0)) throw std::domain_error("p_op: N, t > 0");
  return {"P", [N, t](std::int64_t k) {
            if (k == 0) return cplx{0.0, 0.0};
            return cplx{p_profile(N, t * eigenvalue(k)), 0.0};
          }};
}

// int_0^t Q_s ds/s: the complementary low-frequency block, profile
// P(N, t lambda) (regularized lower incomplete gamma), zero on the constant
// mode.
inline MultiplierOperator band_below_op(double N, double t) {
  if (!(N > 0.0) || !(t > 0.0)) {
    throw std::domain_error("band_below_op: N, t > 0");
  }
  return {"B", [N, t](std::int64_t k) {
            if (k == 0) return cplx{0.0, 0.0};
            return cplx{reg_gamma_lower(N, t * eigenvalue(k)), 0.0};
          }};
}

inline MultiplierOperator hilbert_op() {
  return {"H", [](std::int64_t k) {
            if (k == 0) return cplx{0.0, 0.0};
            return (k > 0) ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
          }};
}

// ---------------------------------------------------------------------------
// Calderon reproducing formula
// ---------------------------------------------------------------------------

namespace detail {

// Trapezoid weights on a log-uniform grid of [t_min, t_max].
inline std::vector<std::pair<double, double>> log_quadrature(double t_min,
                                                             double t_max,
                                                             int n_quad) {
  if (!(t_min > 0.0) || !(t_max > t_min) || n_quad < 2) {
    throw std::invalid_argument("log_quadrature: bad grid");
  }
  const double h =
      (std::log(t_max) - std::log(t_min)) / static_cast<double>(n_quad - 1);
  std::vector<std::pair<double, double>> nodes(n_quad);
  for (int i = 0; i < n_quad; ++i) {
    const double t = std::exp(std::log(t_min) + h * i);
    const double w = (i == 0 || i == n_quad - 1) ? h / 2.0 : h;
    nodes[i] = {t, w};
  }
  return nodes;
}

inline MultiplierOperator q_integral_op(double N, double t_min, double t_max,
                                        int n_quad) {
  auto nodes = log_quadrature(t_min, t_max, n_quad);
  return {"Qint", [N, nodes](std::int64_t k) {
            if (k == 0) return cplx{0.0, 0.0};
            const double lam = eigenvalue(k);
            double acc = 0.0;
            for (const auto& [t, w] : nodes) acc += w * q_profile(N, t * lam);
            return cplx{acc, 0.0};
          }};
}

}  // namespace detail

// Pointwise defect of reconstructing f (minus its mean) from the
// log-quadrature of int Q_t^{(N)} f dt/t over [t_min, t_max].
inline GridFunction calderon_error_field(const GridFunction& f, double N,
                                         double t_min, double t_max,
                                         int n_quad) {
  GridFunction target = f;
  target.subtract_mean();
  if (target.l2_norm() <= 1e-13 * std::fabs(f.mean())) {
    throw std::domain_error("calderon_error_field: input is constant");
  }
  const auto op = detail::q_integral_op(N, t_min, t_max, n_quad);
  const GridFunction rec = apply(op, target);
  GridFunction out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    out.v[i] = target.v[i] - rec.v[i];
  }
  return out;
}

// Relative L^2 size of the reconstruction defect.
inline double calderon_residual(const GridFunction& f, double N, double t_min,
                                double t_max, int n_quad) {
  const GridFunction err = calderon_error_field(f, N, t_min, t_max, n_quad);
  GridFunction target = f;
  target.subtract_mean();
  return err.l2_norm() / target.l2_norm();
}

// Relative L^2 error of P_t^{(N)} f against f - int_0^t Q_s^{(N)} f ds/s on
// mean-zero input. The scalar generator relation t d/dt P = -Q together with
// P_0 = Id forces the minus orientation; the quadrature confirms it.
inline double along_identity_check(const GridFunction& f, double N, double t,
                                   int n_quad) {
  GridFunction target = f;
  target.subtract_mean();
  const double norm = target.l2_norm();
  if (norm <= 1e-13 * std::fabs(f.mean())) {
    throw std::domain_error("along_identity_check: input is constant");
  }
  GridFunction pf = apply(p_op(N, t), target);
  const auto qint = detail::q_integral_op(N, t * 1e-12, t, n_quad);
  GridFunction qf = apply(qint, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = pf.v[i] - (target.v[i] - qf.v[i]);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(target.size())) / norm;
}

// ---------------------------------------------------------------------------
// Off-diagonal probes
// ---------------------------------------------------------------------------

struct OffDiagonalPoint {
  double ratio = 0.0;      // (avg_{B2} |op b|^q)^{1/q} / (avg_{B1} |b|^p)^{1/p}
  double d2_over_t = 0.0;  // squared torus gap over the time scale
};

namespace detail {

inline double torus_gap(const Interval& a, const Interval& b) {
  if (!a.intersect(b).empty()) return 0.0;
  const double direct = std::max(b.left - a.right, a.left - b.right);
  double wrap;
  if (a.left < b.left) {
    wrap = (a.left + 1.0) - b.right;
  } else {
    wrap = (b.left + 1.0) - a.right;
  }
  return std::max(0.0, std::min(direct, wrap));
}

inline std::vector<std::size_t> cells_in(const Interval& I, std::size_t n) {
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) / n;
    if (I.contains(centre)) cells.push_back(i);
  }
  return cells;
}

}  // namespace detail

// Probes the L^p(B1) -> L^q(B2) behaviour of op at time scale t with a small
// bank of bumps supported in B1 (indicator, tent, cosine taper, odd tent).
// The averaged-norm ratio absorbs the |B1|, |B2| prefactors, so for the heat
// family the ratio decays like exp(-c d^2 / t).
inline OffDiagonalPoint off_diagonal_probe(const MultiplierOperator& op,
                                           double t, const Interval& B1,
                                           const Interval& B2, double p_in,
                                           double q_out, std::size_t n) {
  const auto cells1 = detail::cells_in(B1, n);
  const auto cells2 = detail::cells_in(B2, n);
  if (cells1.size() < 2 || cells2.size() < 2) {
    throw std::invalid_argument("off_diagonal_probe: degenerate interval");
  }
  const double m = static_cast<double>(cells1.size());
  OffDiagonalPoint point;
  const double gap = detail::torus_gap(B1, B2);
  point.d2_over_t = gap * gap / t;
  for (int bump = 0; bump < 4; ++bump) {
    GridFunction b(n);
    for (std::size_t j = 0; j < cells1.size(); ++j) {
      const double s = (static_cast<double>(j) + 0.5) / m;  // in (0,1)
      double val = 1.0;
      if (bump == 1) val = 1.0 - std::fabs(2.0 * s - 1.0);
      if (bump == 2) val = std::sin(M_PI * s) * std::sin(M_PI * s);
      if (bump == 3) val = 2.0 * s - 1.0;
      b.v[cells1[j]] = val;
    }
    double den = 0.0;
    for (std::size_t c : cells1) den += std::pow(std::fabs(b.v[c]), p_in);
    den = std::pow(den / m, 1.0 / p_in);
    if (den == 0.0) continue;
    const GridFunction u = apply(op, b);
    double num = 0.0;
    if (std::isinf(q_out)) {
      for (std::size_t c : cells2) num = std::max(num, std::fabs(u.v[c]));
    } else {
      for (std::size_t c : cells2) {
        num += std::pow(std::fabs(u.v[c]), q_out);
      }
      num = std::pow(num / static_cast<double>(cells2.size()), 1.0 / q_out);
    }
    point.ratio = std::max(point.ratio, num / den);
  }
  return point;
}

struct OffDiagonalFit {
  double c = 0.0;          // fitted decay rate against d^2/t
  double intercept = 0.0;  // log prefactor
  double r2 = 0.0;
  std::vector<OffDiagonalPoint> points;
};

// Measures the probe over a range of separations d^2/t in [x_min, x_max] and
// fits log(ratio) = intercept - c (d^2/t).
inline OffDiagonalFit off_diagonal_sweep(const MultiplierOperator& op,
                                         double t, std::size_t n,
                                         double x_min = 1.0,
                                         double x_max = 25.0,
                                         int points = 9) {
  const double radius = std::sqrt(t);
  const Interval B1{0.05, 0.05 + 2.0 * radius};
  OffDiagonalFit fit;
  for (int i = 0; i < points; ++i) {
    const double x =
        x_min + (x_max - x_min) * static_cast<double>(i) / (points - 1);
    const double gap = std::sqrt(x * t);
    const Interval B2{B1.right + gap, B1.right + gap + 2.0 * radius};
    if (B2.right >= 1.0) break;
    fit.points.push_back(off_diagonal_probe(op, t, B1, B2, 2.0, 2.0, n));
  }
  if (fit.points.size() < 3) {
    throw std::invalid_argument("off_diagonal_sweep: not enough room");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  const double cnt = static_cast<double>(fit.points.size());
  for (const auto& pt : fit.points) {
    const double x = pt.d2_over_t;
    const double y = std::log(std::max(pt.ratio, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.c = -slope;
  fit.intercept = (sy - slope * sx) / cnt;
  const double ss_tot = syy - sy * sy / cnt;
  double ss_res = 0.0;
  for (const auto& pt : fit.points) {
    const double y = std::log(std::max(pt.ratio, 1e-300));
    const double yhat = fit.intercept + slope * pt.d2_over_t;
    ss_res += (y - yhat) * (y - yhat);
  }
  fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Maximal operators
// ---------------------------------------------------------------------------

namespace detail {

// Prefix table of cell integrals of |f|^s; integral over [a,b] cut to [0,1]
// is exact for the piecewise-constant grid function.
class AbsPowIntegrals {
 public:
  AbsPowIntegrals(const GridFunction& f, double s) : n_(f.size()) {
    prefix_.resize(n_ + 1, 0.0);
    cell_.resize(n_);
    const double h = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      cell_[i] = std::pow(std::fabs(f.v[i]), s);
      prefix_[i + 1] = prefix_[i] + cell_[i] * h;
    }
  }

  double integral(double a, double b) const {
    a = std::max(0.0, a);
    b = std::min(1.0, b);
    if (b <= a) return 0.0;
    return partial(b) - partial(a);
  }

 private:
  double partial(double x) const {
    const double n = static_cast<double>(n_);
    const double pos = x * n;
    const auto i =
        static_cast<std::size_t>(std::min(n - 1.0, std::floor(pos)));
    return prefix_[i] + cell_[i] * (pos - static_cast<double>(i)) / n;
  }

  std::size_t n_;
  std::vector<double> prefix_;
  std::vector<double> cell_;
};

inline int grid_depth(std::size_t n) {
  int m = 0;
  while ((static_cast<std::size_t>(1) << m) < n) ++m;
  if ((static_cast<std::size_t>(1) << m) != n) {
    throw std::invalid_argument("grid size must be a power of two");
  }
  return m;
}

}  // namespace detail

// Dyadic Hardy-Littlewood maximal function on the grid: at each cell the
// supremum over the cubes of both systems that contain the cell of the
// |f|^s-average, to the power 1/s. f extends by zero outside [0,1).
inline GridFunction hardy_littlewood(const GridFunction& f, double s) {
  if (!(s >= 1.0)) throw std::domain_error("hardy_littlewood: s >= 1");
  const std::size_t n = f.size();
  const int m = detail::grid_depth(n);
  const detail::AbsPowIntegrals table(f, s);
  GridFunction out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) / n;
    const Interval cell{static_cast<double>(i) / n,
                        static_cast<double>(i + 1) / n};
    double best = 0.0;
    for (int b = 0; b < 2; ++b) {
      for (int k = 0; k <= m; ++k) {
        const DyadicCube q = cube_containing(b, k, centre);
        const Interval iq = q.interval();
        if (!(iq.left <= cell.left + 1e-15 && cell.right <= iq.right + 1e-15)) {
          continue;  // shifted cube cuts the cell
        }
        const double avg = table.integral(iq.left, iq.right) / q.length();
        best = std::max(best, avg);
      }
    }
    out.v[i] = std::pow(best, 1.0 / s);
  }
  return out;
}

// Weighted dyadic maximal function over one system: the h-average of |f|
// over the cubes containing each cell, cubes clipped to [0,1].
inline GridFunction weighted_dyadic_maximal(const GridFunction& f,
                                            const Weight& h, int system) {
  const std::size_t n = f.size();
  const int m = detail::grid_depth(n);
  std::vector<double> wcell(n), fw(n + 1, 0.0), wsum(n + 1, 0.0);
  const Interval unit = unit_interval();
  for (std::size_t i = 0; i < n; ++i) {
    const Interval cell{static_cast<double>(i) / n,
                        static_cast<double>(i + 1) / n};
    wcell[i] = h.measure(cell);
    fw[i + 1] = fw[i] + std::fabs(f.v[i]) * wcell[i];
    wsum[i + 1] = wsum[i] + wcell[i];
  }
  auto range_sums = [&](const Interval& I) {
    const Interval J = I.intersect(unit);
    if (J.empty()) return std::pair<double, double>{0.0, 0.0};
    const auto lo = static_cast<std::size_t>(
        std::llround(J.left * static_cast<double>(n)));
    const auto hi = static_cast<std::size_t>(
        std::llround(J.right * static_cast<double>(n)));
    return std::pair<double, double>{fw[hi] - fw[lo], wsum[hi] - wsum[lo]};
  };
  GridFunction out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) / n;
    double best = 0.0;
    for (int k = 0; k <= m; ++k) {
      const DyadicCube q = cube_containing(system, k, centre);
      auto [num, den] = range_sums(q.interval());
      if (den > 0.0) best = std::max(best, num / den);
    }
    out.v[i] = best;
  }
  return out;
}

// sup over cubes of one system containing the cell of the infimum of the
// Hardy-Littlewood function over the cube. On the grid the single-cell cube
// participates in the supremum, so for the aligned system this equals the
// Hardy-Littlewood function cell-exactly.
inline GridFunction m_star(const GridFunction& f, int system) {
  const std::size_t n = f.size();
  const int m = detail::grid_depth(n);
  const GridFunction M = hardy_littlewood(f, 1.0);
  GridFunction out(n, 0.0);
  // sparse table over cells for range-minima
  std::vector<std::vector<double>> mins(1, M.v);
  for (int lvl = 1; (static_cast<std::size_t>(1) << lvl) <= n; ++lvl) {
    const std::size_t len = static_cast<std::size_t>(1) << lvl;
    std::vector<double> row(n - len + 1);
    for (std::size_t i = 0; i + len <= n; ++i) {
      row[i] = std::min(mins[lvl - 1][i], mins[lvl - 1][i + len / 2]);
    }
    mins.push_back(std::move(row));
  }
  auto range_min = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    const std::size_t len = hi - lo;
    int lvl = 0;
    while ((static_cast<std::size_t>(2) << lvl) <= len) ++lvl;
    const std::size_t blk = static_cast<std::size_t>(1) << lvl;
    return std::min(mins[lvl][lo], mins[lvl][hi - blk]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) / n;
    double best = 0.0;
    for (int k = 0; k <= m; ++k) {
      const DyadicCube q = cube_containing(system, k, centre);
      const Interval J = q.interval().intersect(unit_interval());
      if (J.empty()) continue;
      auto lo = static_cast<std::size_t>(
          std::floor(J.left * static_cast<double>(n) + 1e-9));
      auto hi = static_cast<std::size_t>(
          std::ceil(J.right * static_cast<double>(n) - 1e-9));
      hi = std::min(hi, n);
      if (hi <= lo) continue;
      best = std::max(best, range_min(lo, hi));
    }
    out.v[i] = best;
  }
  return out;
}

// Frequency-truncated maximal operator: at each cell of q0, the supremum
// over the cubes Q of q0's system with cell in Q, Q inside q0, of
//
//   ( avg_Q | T P^{(N)}_{l(Q)^2} f |^{q0} )^{1/q0},
//
// grid maxima when q0 = inf. Zero outside q0.
inline GridFunction t_sharp(const MultiplierOperator& T, const GridFunction& f,
                            double N, double q0, const DyadicCube& cube0) {
  if (!(N >= 3.0)) {
    throw std::domain_error("t_sharp: need N >= 3 for the 1-D decay budget");
  }
  if (cube0.system != 0) {
    throw std::invalid_argument("t_sharp: root cube must be in system 0");
  }
  const std::size_t n = f.size();
  const int m = detail::grid_depth(n);
  if (cube0.level > m || cube0.index < 0 ||
      (cube0.index + 1) * (static_cast<std::int64_t>(1) << (m - cube0.level)) >
          static_cast<std::int64_t>(n)) {
    throw WindowError("t_sharp: cube escapes the grid");
  }
  const std::size_t lo =
      static_cast<std::size_t>(cube0.index)
      << (m - cube0.level);
  const std::size_t width = static_cast<std::size_t>(1) << (m - cube0.level);
  const auto spec = spectrum(f);
  GridFunction out(n, 0.0);
  const bool use_max = std::isinf(q0);
  for (int k = cube0.level; k <= m; ++k) {
    const double t = std::ldexp(1.0, -2 * k);  // l(Q)^2
    const GridFunction g = synthesize(spec, compose(T, p_op(N, t)));
    const std::size_t span = static_cast<std::size_t>(1) << (m - k);
    for (std::size_t start = lo; start < lo + width; start += span) {
      double val = 0.0;
      if (use_max) {
        for (std::size_t i = start; i < start + span; ++i) {
          val = std::max(val, std::fabs(g.v[i]));
        }
      } else {
        for (std::size_t i = start; i < start + span; ++i) {
          val += std::pow(std::fabs(g.v[i]), q0);
        }
        val = std::pow(val / static_cast<double>(span), 1.0 / q0);
      }
      for (std::size_t i = start; i < start + span; ++i) {
        out.v[i] = std::max(out.v[i], val);
      }
    }
  }
  return out;
}

}  // namespace sparsedom
