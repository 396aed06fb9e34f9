#pragma once

// Shifted nested dyadic interval grids on the working window.
//
// Two systems are kept: the standard grid (system 0) and the one-third
// shifted grid (system 1) whose level-k cubes are
//
//   2^{-k} [ m + s(k), m + 1 + s(k) ),   s(k) = (-1)^k / 3.
//
// The alternating shift makes system 1 nested across levels while keeping
// its boundary points at distance >= 2^{-k}/3 from those of system 0, which
// is what lets every small interval be covered by a cube of comparable
// length from one of the two systems.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparsedom/base.hpp"

namespace sparsedom {

class LeafError : public std::domain_error {
  using std::domain_error::domain_error;
};

class CoveringUndefinedError : public std::domain_error {
  using std::domain_error::domain_error;
};

struct DyadicCube {
  int system = 0;           // 0: standard grid, 1: one-third shifted grid
  int level = 0;            // side length 2^{-level}, level >= 0
  std::int64_t index = 0;

  double shift() const {
    if (system == 0) return 0.0;
    return (level % 2 == 0) ? (1.0 / 3.0) : (-1.0 / 3.0);
  }
  double length() const { return std::ldexp(1.0, -level); }
  double left() const {
    return (static_cast<double>(index) + shift()) * length();
  }
  double right() const {
    return (static_cast<double>(index) + 1.0 + shift()) * length();
  }
  Interval interval() const { return {left(), right()}; }

  friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return a.system == b.system && a.level == b.level && a.index == b.index;
  }
};

// The two half-length cubes tiling q. For system 1 the child indices pick up
// the alternating shift: left child index is 2m + (-1)^level.
inline std::pair<DyadicCube, DyadicCube> children(const DyadicCube& q) {
  std::int64_t base = 2 * q.index;
  if (q.system == 1) base += (q.level % 2 == 0) ? 1 : -1;
  return {DyadicCube{q.system, q.level + 1, base},
          DyadicCube{q.system, q.level + 1, base + 1}};
}

inline DyadicCube parent(const DyadicCube& q) {
  if (q.level <= 0) {
    throw LeafError("parent: level-0 cubes are roots");
  }
  std::int64_t base = q.index;
  if (q.system == 1) base -= ((q.level - 1) % 2 == 0) ? 1 : -1;
  const std::int64_t p = (base >= 0) ? base / 2 : -((-base + 1) / 2);
  return DyadicCube{q.system, q.level - 1, p};
}

// 5Q := { x : d(x, Q) <= 4 l(Q) }, an interval of length 9 l(Q).
inline Interval dilate5(const DyadicCube& q) {
  const double l = q.length();
  return {q.left() - 4.0 * l, q.right() + 4.0 * l};
}

// Cube of the given system and level whose half-open interval contains x.
inline DyadicCube cube_containing(int system, int level, double x) {
  DyadicCube probe{system, level, 0};
  const double scaled = x / probe.length() - probe.shift();
  auto idx = static_cast<std::int64_t>(std::floor(scaled));
  DyadicCube q{system, level, idx};
  // Guard against rounding at the cell boundary.
  if (x < q.left()) q.index -= 1;
  if (x >= q.right()) q.index += 1;
  return q;
}

struct DyadicSystem {
  int system = 0;
  Interval win = window();
  int max_level = 40;

  std::pair<DyadicCube, DyadicCube> split(const DyadicCube& q) const {
    if (q.level >= max_level) {
      throw LeafError("split: cube is at the finest level of the system");
    }
    return children(q);
  }

  // All level-k cubes meeting the window.
  std::vector<DyadicCube> level_cubes(int level) const {
    std::vector<DyadicCube> out;
    DyadicCube first = cube_containing(system, level, win.left);
    for (DyadicCube q = first; q.left() < win.right; ++q.index) {
      out.push_back(q);
    }
    return out;
  }
};

namespace detail {
// Largest k >= 0 with 2^{-k} >= len.
inline int coarsest_level_covering(double len) {
  if (len >= 1.0) return 0;
  int k = static_cast<int>(std::floor(-std::log2(len)));
  while (k > 0 && std::ldexp(1.0, -k) < len) --k;
  return k;
}
}  // namespace detail

// Smallest cube (from either system) containing I. The covering ratio
// length(Q)/length(I) is bounded by a constant that the property suite
// measures; it stays well below 8 for intervals of length <= 1/3.
inline DyadicCube cover_interval(const Interval& I, int max_level = 40) {
  if (I.empty()) {
    throw std::invalid_argument("cover_interval: empty interval");
  }
  if (!(window().left <= I.left && I.right <= window().right)) {
    throw WindowError("cover_interval: interval escapes the working window");
  }
  bool found = false;
  DyadicCube best;
  const int top = std::min(max_level, detail::coarsest_level_covering(I.length()));
  for (int b = 0; b < 2; ++b) {
    for (int k = top; k >= 0; --k) {
      const DyadicCube q = cube_containing(b, k, I.left);
      if (q.left() <= I.left && I.right <= q.right()) {
        if (!found || q.level > best.level) best = q;
        found = true;
        break;  // deepest level of this system reached
      }
    }
  }
  if (!found) {
    throw WindowError("cover_interval: no covering cube at window scale");
  }
  return best;
}

// Maximal dyadic covering of a cell set E inside q0. `cells` flags the
// finest-level cells of q0 (resolution 2^{-grid_level}); the result is the
// set of maximal cubes of q0's system that are entirely inside E. Their
// parents all meet the complement of E, and their disjoint union is E.
inline std::vector<DyadicCube> maximal_covering(
    const std::vector<std::uint8_t>& cells, const DyadicCube& q0,
    int grid_level) {
  if (grid_level < q0.level) {
    throw std::invalid_argument("maximal_covering: grid coarser than cube");
  }
  const std::size_t n = static_cast<std::size_t>(1)
                        << (grid_level - q0.level);
  if (cells.size() != n) {
    throw std::invalid_argument("maximal_covering: cell count mismatch");
  }
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + (cells[i] ? 1 : 0);
  }
  if (prefix[n] == n) {
    throw CoveringUndefinedError(
        "maximal_covering: E fills the whole cube, no maximal cover exists");
  }
  if (prefix[n] == 0) return {};

  std::vector<DyadicCube> out;
  struct Node {
    DyadicCube q;
    std::size_t lo, hi;
  };
  std::vector<Node> stack{{q0, 0, n}};
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    const std::size_t cnt = prefix[node.hi] - prefix[node.lo];
    if (cnt == 0) continue;
    if (cnt == node.hi - node.lo) {
      out.push_back(node.q);
      continue;
    }
    const auto [lo_child, hi_child] = children(node.q);
    const std::size_t mid = node.lo + (node.hi - node.lo) / 2;
    stack.push_back({hi_child, mid, node.hi});
    stack.push_back({lo_child, node.lo, mid});
  }
  return out;
}

}  // namespace sparsedom
