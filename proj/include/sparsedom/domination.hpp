#pragma once

// Constructive sparse domination by stopping time.
//
// Given the operator T, inputs f, g supported around a root cube Q0 and a
// threshold eta, the recursion certifies
//
//   | int_{Q0} Tf g | <= C * sum_{P in S} |P| <|f|^{p0}>_{5P}^{1/p0}
//                                             <|g|^{q0'}>_{5P}^{1/q0'}
//
// by building the collection S explicitly. At each selected cube B the
// exceptional set
//
//   E = { x in B : max( M*_{B,p0}[f 1_{5B}], T#_B[f 1_{5B}] )
//                  > eta (avg_{5B} |f|^{p0})^{1/p0} }
//
// is covered by maximal cubes whose parents exit E; those cubes are the
// children of B in S and the recursion continues on them with f, g cut to
// their 5-fold neighbourhoods. The mass outstanding when entering a child B
// is |int_B T[int_0^{l(B)^2} Q_t (f 1_{5B}) dt/t] g|, and the per-depth sum
// of those masses is the remainder log; it decays geometrically once eta is
// large enough. The constant C is measured, not assumed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparsedom/base.hpp"
#include "sparsedom/dyadic.hpp"
#include "sparsedom/exponents.hpp"
#include "sparsedom/grid.hpp"
#include "sparsedom/operators.hpp"
#include "sparsedom/sparse.hpp"

namespace sparsedom {

struct DominationLevel {
  int depth = 0;
  std::size_t selected = 0;        // cubes entered at this depth
  double selected_measure = 0.0;   // total measure of those cubes
  double max_child_ratio = 0.0;    // worst covered fraction at this depth
  double remainder_mass = 0.0;     // outstanding integral mass entering it
};

struct DominationResult {
  SparseCollection collection;
  double eta = 0.0;
  double lhs = 0.0;       // | int_{Q0} Tf g |
  double rhs_form = 0.0;  // sparse form of the certificate, lambda = 5
  double constant = 0.0;  // lhs / rhs_form
  std::vector<DominationLevel> levels;
  bool resolution_warning = false;  // remainder above tolerance at the leaves
};

namespace detail {

struct DominationState {
  const MultiplierOperator* T;
  const GridFunction* f;
  const GridFunction* g;
  ExponentConfig cfg;
  double N;
  double eta;
  int max_depth;
  int grid_level;
  std::size_t n;
  SparseCollection collection;
  std::vector<DominationLevel> levels;
  double unresolved = 0.0;
};

inline double cell_integral_product(const GridFunction& a,
                                    const GridFunction& b, std::size_t lo,
                                    std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += a.v[i] * b.v[i];
  return acc / static_cast<double>(a.size());
}

// sup over system-0 cubes Q with cell in Q and Q inside `root` of the
// infimum of base over Q: bottom-up minima per level, then a running
// maximum down the ancestor chain.
inline std::vector<double> restricted_inf_sup(const std::vector<double>& base,
                                              int levels_down) {
  std::vector<std::vector<double>> mins;
  mins.push_back(base);
  for (int l = 0; l < levels_down; ++l) {
    const auto& prev = mins.back();
    std::vector<double> next(prev.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = std::min(prev[2 * i], prev[2 * i + 1]);
    }
    mins.push_back(std::move(next));
  }
  std::vector<double> out(base.size(), 0.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    double best = 0.0;
    std::size_t idx = i;
    for (int l = 0; l <= levels_down; ++l) {
      best = std::max(best, mins[l][idx]);
      idx >>= 1;
    }
    out[i] = best;
  }
  return out;
}

inline void dominate_node(DominationState& st, const DyadicCube& cube,
                          int depth, double entry_mass) {
  st.collection.cubes.push_back(cube);
  if (st.levels.size() <= static_cast<std::size_t>(depth)) {
    st.levels.push_back(DominationLevel{depth});
  }
  DominationLevel& log = st.levels[static_cast<std::size_t>(depth)];
  log.selected += 1;
  log.selected_measure += cube.length();
  log.remainder_mass += entry_mass;

  const std::size_t span = static_cast<std::size_t>(1)
                           << (st.grid_level - cube.level);
  const std::size_t lo = static_cast<std::size_t>(cube.index) * span;

  if (depth >= st.max_depth || cube.level >= st.grid_level) {
    st.unresolved += entry_mass;
    return;
  }

  const Interval nb5 = dilate5(cube).intersect(window());
  const GridFunction f_loc = restrict_to(*st.f, nb5);
  const detail::AbsPowIntegrals ftable(f_loc, st.cfg.p0);
  const double avg5 =
      ftable.integral(nb5.left, nb5.right) / nb5.length();
  const double threshold_base = std::pow(avg5, 1.0 / st.cfg.p0);
  if (threshold_base == 0.0) return;  // nothing supported near this cube

  // Exceptional set from the two maximal operators of the local function.
  const GridFunction mp0 = hardy_littlewood(f_loc, st.cfg.p0);
  std::vector<double> base(span);
  for (std::size_t i = 0; i < span; ++i) base[i] = mp0.v[lo + i];
  const std::vector<double> mstar =
      restricted_inf_sup(base, st.grid_level - cube.level);
  const GridFunction tsh = t_sharp(*st.T, f_loc, st.N, st.cfg.q0, cube);

  const double cut = st.eta * threshold_base;
  std::vector<std::uint8_t> cells(span, 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < span; ++i) {
    if (std::max(mstar[i], tsh.v[lo + i]) > cut) {
      cells[i] = 1;
      ++count;
    }
  }
  const double ratio =
      static_cast<double>(count) / static_cast<double>(span);
  log.max_child_ratio = std::max(log.max_child_ratio, ratio);
  if (ratio > 0.5) throw NonSparseThresholdError(ratio);
  if (count == 0) return;

  const std::vector<DyadicCube> cover =
      maximal_covering(cells, cube, st.grid_level);
  for (const DyadicCube& child : cover) {
    const Interval child5 = dilate5(child).intersect(window());
    const GridFunction f_child = restrict_to(*st.f, child5);
    const GridFunction tb = apply(
        compose(*st.T, band_below_op(st.N, child.length() * child.length())),
        f_child);
    const std::size_t cspan = static_cast<std::size_t>(1)
                              << (st.grid_level - child.level);
    const std::size_t clo = static_cast<std::size_t>(child.index) * cspan;
    const double mass =
        std::fabs(cell_integral_product(tb, *st.g, clo, clo + cspan));
    dominate_node(st, child, depth + 1, mass);
  }
}

}  // namespace detail

// Runs the stopping-time recursion. f and g live on the torus grid and are
// cut to 5Q0 implicitly (the averages only look there); Q0 must be a
// system-0 cube within the grid. Throws NonSparseThresholdError when some
// node's exceptional set exceeds half of the node.
inline DominationResult sparse_dominate(const MultiplierOperator& T,
                                        const GridFunction& f,
                                        const GridFunction& g,
                                        const DyadicCube& cube0,
                                        const ExponentConfig& cfg, double N,
                                        double eta, int max_depth = -1) {
  if (!(eta > 1.0)) {
    throw std::invalid_argument("sparse_dominate: eta must exceed 1");
  }
  if (cube0.system != 0) {
    throw std::invalid_argument("sparse_dominate: root must be in system 0");
  }
  if (f.size() != g.size()) {
    throw std::invalid_argument("sparse_dominate: grid size mismatch");
  }
  detail::DominationState st{&T,  &f,  &g, cfg, N, eta, 0, 0, f.size(), {},
                             {}, 0.0};
  st.grid_level = detail::grid_depth(f.size());
  st.max_depth =
      (max_depth < 0) ? (st.grid_level - cube0.level) : max_depth;

  DominationResult result;
  result.eta = eta;

  const std::size_t span = static_cast<std::size_t>(1)
                           << (st.grid_level - cube0.level);
  const std::size_t lo = static_cast<std::size_t>(cube0.index) * span;

  const Interval nb5 = dilate5(cube0).intersect(window());
  const detail::AbsPowIntegrals ftable(restrict_to(f, nb5), cfg.p0);
  if (ftable.integral(nb5.left, nb5.right) == 0.0) {
    return result;  // f vanishes around the root
  }

  const GridFunction tf = apply(T, f);
  result.lhs =
      std::fabs(detail::cell_integral_product(tf, g, lo, lo + span));

  detail::dominate_node(st, cube0, 0, result.lhs);

  result.collection = std::move(st.collection);
  result.levels = std::move(st.levels);
  result.rhs_form = sparse_form(result.collection, TestFunction::sampled(f.v),
                                TestFunction::sampled(g.v), cfg, 5.0);
  result.constant = (result.rhs_form > 0.0) ? result.lhs / result.rhs_form
                                            : 0.0;
  result.resolution_warning =
      st.unresolved > 1e-8 * std::max(result.lhs, 1e-300);
  return result;
}

// Smallest power-of-two eta for which every corpus pair runs with covered
// fractions at most 1/4 on every node, leaving a factor-two margin against
// the packing bound. Throws CalibrationError when no eta <= 2^20 works.
inline double calibrate_eta(
    const MultiplierOperator& T,
    const std::vector<std::pair<GridFunction, GridFunction>>& corpus,
    const DyadicCube& cube0, const ExponentConfig& cfg, double N) {
  if (corpus.empty()) {
    throw std::invalid_argument("calibrate_eta: empty corpus");
  }
  for (int e = 1; e <= 20; ++e) {
    const double eta = std::ldexp(1.0, e);
    bool ok = true;
    for (const auto& [f, g] : corpus) {
      try {
        const DominationResult res = sparse_dominate(T, f, g, cube0, cfg,
                                                     N, eta);
        for (const DominationLevel& lvl : res.levels) {
          if (lvl.max_child_ratio > 0.25) {
            ok = false;
            break;
          }
        }
      } catch (const NonSparseThresholdError&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (ok) return eta;
  }
  throw CalibrationError(
      "calibrate_eta: no eta up to 2^20 keeps the covered fraction small; "
      "the operator violates the model assumptions");
}

}  // namespace sparsedom
