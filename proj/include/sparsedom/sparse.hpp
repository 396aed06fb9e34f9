#pragma once

// Sparse collections of dyadic cubes furnished with the Carleson-packing
// verifier, and the bilinear sparse form
//
//   form(S, f, g) = sum_{P in S} |P| <|f|^{p0}>_{lP}^{1/p0}
//                                 <|g|^{q0'}>_{lP}^{1/q0'},   l in {1, 5},
//
// which upper-bounds the operator pairing |<Tf, g>|. A collection is sparse
// when for every member P the maximal members strictly inside P occupy at
// most half of P. Mixed-system collections are allowed; containment is then
// decided on the underlying intervals.
//
// For power-law inputs over the canonical collection { [0, 2^{-n}] } the
// form is a geometric series; the closed form and its truncation tail bound
// are exposed alongside the summed version.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/dyadic.hpp"
#include "sparsedom/exponents.hpp"

namespace sparsedom {

struct SparseCollection {
  std::vector<DyadicCube> cubes;
};

struct SparsenessReport {
  bool sparse = true;
  double worst_ratio = 0.0;
  DyadicCube worst_cube;
};

// Verifies the packing condition. For each member, the maximal members
// strictly inside it are exactly those whose smallest proper container
// within the collection is that member, so one containment scan suffices.
inline SparsenessReport is_sparse(const SparseCollection& S) {
  constexpr double kEps = 1e-13;
  std::vector<DyadicCube> cubes = S.cubes;
  std::sort(cubes.begin(), cubes.end(),
            [](const DyadicCube& a, const DyadicCube& b) {
              if (a.system != b.system) return a.system < b.system;
              if (a.level != b.level) return a.level < b.level;
              return a.index < b.index;
            });
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());

  const std::size_t n = cubes.size();
  std::vector<double> child_mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval ci = cubes[i].interval();
    std::int64_t best = -1;
    double best_len = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Interval cj = cubes[j].interval();
      const bool proper = cj.left <= ci.left + kEps &&
                          ci.right <= cj.right + kEps &&
                          cj.length() > ci.length() + kEps;
      if (proper && cj.length() < best_len) {
        best_len = cj.length();
        best = static_cast<std::int64_t>(j);
      }
    }
    if (best >= 0) {
      child_mass[static_cast<std::size_t>(best)] += ci.length();
    }
  }

  SparsenessReport rep;
  if (n == 0) return rep;
  rep.worst_cube = cubes.front();
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = child_mass[i] / cubes[i].length();
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_cube = cubes[i];
    }
  }
  rep.sparse = rep.worst_ratio <= 0.5 + 1e-12;
  return rep;
}

// { [0, 2^{-n}] : 0 <= n <= n_max } in the standard system. Each member has
// exactly one maximal strict sub-member of half its measure, so the packing
// ratio is exactly 1/2.
inline SparseCollection canonical_collection(int n_max) {
  if (n_max < 0) {
    throw std::invalid_argument("canonical_collection: n_max >= 0");
  }
  SparseCollection S;
  for (int k = 0; k <= n_max; ++k) S.cubes.push_back(DyadicCube{0, k, 0});
  return S;
}

// A test input for the bilinear form: either coef * x^a cut off to [0,1], or
// a signed sampled function on the uniform grid of [0,1). Both extend by
// zero outside [0,1].
class TestFunction {
 public:
  static TestFunction power(double a, double coef = 1.0) {
    if (!(coef > 0.0)) {
      throw std::invalid_argument("TestFunction::power: coef must be > 0");
    }
    return TestFunction(Power{a, coef});
  }
  static TestFunction sampled(std::vector<double> values) {
    if (values.empty()) {
      throw std::invalid_argument("TestFunction::sampled: empty grid");
    }
    return TestFunction(Sampled{std::move(values)});
  }
  static TestFunction indicator() { return power(0.0, 1.0); }

  bool is_power() const { return std::holds_alternative<Power>(rep_); }
  double exponent() const { return std::get<Power>(rep_).a; }
  double coefficient() const { return std::get<Power>(rep_).coef; }
  const std::vector<double>& values() const {
    return std::get<Sampled>(rep_).v;
  }

  TestFunction scaled(double c) const {
    if (!(c > 0.0)) {
      throw std::invalid_argument("TestFunction::scaled: c must be > 0");
    }
    if (is_power()) return power(exponent(), coefficient() * c);
    std::vector<double> v = values();
    for (double& x : v) x *= c;
    return sampled(std::move(v));
  }

  // <|f|^s>_I with zero extension: the integral runs over I cut to [0,1]
  // while the average is taken against the full |I|.
  double abs_average_pow(const Interval& I, double s) const {
    if (I.empty()) {
      throw std::invalid_argument("TestFunction: empty interval");
    }
    const Interval J = I.intersect(unit_interval());
    if (J.empty()) return 0.0;
    if (is_power()) {
      const double e = exponent() * s;
      double integral;
      if (J.left <= 0.0) {
        integral = (e <= -1.0) ? kInf : std::pow(J.right, e + 1.0) / (e + 1.0);
      } else if (std::fabs(e + 1.0) < 1e-13) {
        integral = std::log(J.right / J.left);
      } else {
        integral =
            (std::pow(J.right, e + 1.0) - std::pow(J.left, e + 1.0)) /
            (e + 1.0);
      }
      return std::pow(coefficient(), s) * integral / I.length();
    }
    const auto& v = values();
    const auto n = static_cast<double>(v.size());
    const double lo = J.left * n;
    const double hi = J.right * n;
    const auto ilo = static_cast<std::size_t>(std::floor(lo));
    const auto ihi =
        static_cast<std::size_t>(std::min(n - 1.0, std::floor(hi)));
    double total = 0.0;
    for (std::size_t i = ilo; i <= ihi; ++i) {
      const double cell_lo = std::max(lo, static_cast<double>(i));
      const double cell_hi = std::min(hi, static_cast<double>(i + 1));
      if (cell_hi > cell_lo) {
        total += std::pow(std::fabs(v[i]), s) * (cell_hi - cell_lo);
      }
    }
    return total / n / I.length();
  }

 private:
  struct Power {
    double a;
    double coef;
  };
  struct Sampled {
    std::vector<double> v;
  };
  explicit TestFunction(Power p) : rep_(p) {}
  explicit TestFunction(Sampled s) : rep_(std::move(s)) {}

  std::variant<Power, Sampled> rep_;
};

// The bilinear sparse form. lambda = 5 dilates each cube and clips at the
// working window; lambda = 1 sums over the cubes themselves. Divergent
// averages propagate as +inf.
inline double sparse_form(const SparseCollection& S, const TestFunction& f,
                          const TestFunction& g, const ExponentConfig& cfg,
                          double lambda = 5.0) {
  if (lambda != 1.0 && lambda != 5.0) {
    throw std::invalid_argument("sparse_form: lambda must be 1 or 5");
  }
  double total = 0.0;
  for (const DyadicCube& P : S.cubes) {
    const Interval around = (lambda == 1.0)
                                ? P.interval()
                                : dilate5(P).intersect(window());
    const double fa = f.abs_average_pow(around, cfg.p0);
    const double fterm = std::pow(fa, 1.0 / cfg.p0);
    double gterm;
    if (cfg.q0_conj == 1.0) {
      gterm = g.abs_average_pow(around, 1.0);
    } else {
      gterm = std::pow(g.abs_average_pow(around, cfg.q0_conj),
                       1.0 / cfg.q0_conj);
    }
    total += P.length() * fterm * gterm;
    if (std::isinf(total)) return kInf;
  }
  return total;
}

// Closed form of the canonical-collection sum (lambda = 1) for the power
// pair f = x^{af}, g = x^{ag} cut to [0,1]:
//
//   term_n = C 2^{-n(1+af+ag)},  C = (1+p0 af)^{-1/p0} (1+q0' ag)^{-1/q0'},
//
// so the series converges iff 1 + af + ag > 0. n_max < 0 sums the full
// series; otherwise terms n = 0..n_max are taken.
inline double canonical_form_closed(double af, double ag,
                                    const ExponentConfig& cfg,
                                    long n_max = -1) {
  const double cf = 1.0 + cfg.p0 * af;
  const double cg = 1.0 + cfg.q0_conj * ag;
  if (cf <= 0.0 || cg <= 0.0) return kInf;
  const double coef =
      std::pow(cf, -1.0 / cfg.p0) * std::pow(cg, -1.0 / cfg.q0_conj);
  const double ratio = std::exp2(-(1.0 + af + ag));
  if (n_max < 0) {
    if (ratio >= 1.0) return kInf;
    return coef / (1.0 - ratio);
  }
  if (std::fabs(ratio - 1.0) < 1e-15) {
    return coef * static_cast<double>(n_max + 1);
  }
  return coef * (1.0 - std::pow(ratio, static_cast<double>(n_max + 1))) /
         (1.0 - ratio);
}

// Tail of the truncated canonical sum: sum_{n > n_max} term_n.
inline double canonical_form_tail_bound(double af, double ag,
                                        const ExponentConfig& cfg,
                                        long n_max) {
  const double cf = 1.0 + cfg.p0 * af;
  const double cg = 1.0 + cfg.q0_conj * ag;
  if (cf <= 0.0 || cg <= 0.0) return kInf;
  const double coef =
      std::pow(cf, -1.0 / cfg.p0) * std::pow(cg, -1.0 / cfg.q0_conj);
  const double ratio = std::exp2(-(1.0 + af + ag));
  if (ratio >= 1.0) return kInf;
  return coef * std::pow(ratio, static_cast<double>(n_max + 1)) /
         (1.0 - ratio);
}

}  // namespace sparsedom
