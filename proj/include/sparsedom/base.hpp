#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sparsedom {

// Working window on the real line. Every cube handled by the library lives
// inside [kWindowLeft, kWindowRight], and the 5-fold neighbourhood of any
// cube contained in [0,1] stays inside the window.
inline constexpr double kWindowLeft = -8.0;
inline constexpr double kWindowRight = 9.0;

// Half-open interval [left, right).
struct Interval {
  double left = 0.0;
  double right = 0.0;

  double length() const { return right - left; }
  bool empty() const { return right <= left; }
  bool contains(double x) const { return left <= x && x < right; }
  bool contains(const Interval& other) const {
    return left <= other.left && other.right <= right;
  }
  Interval intersect(const Interval& other) const {
    Interval r{std::max(left, other.left), std::min(right, other.right)};
    if (r.right < r.left) r.right = r.left;
    return r;
  }
};

inline Interval window() { return {kWindowLeft, kWindowRight}; }
inline Interval unit_interval() { return {0.0, 1.0}; }

class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class WindowError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Raised by the stopping-time recursion when the threshold eta is too small
// to keep the selected cubes below half of the parent's measure.
class NonSparseThresholdError : public std::runtime_error {
 public:
  explicit NonSparseThresholdError(double ratio)
      : std::runtime_error("selected cubes cover fraction " +
                           std::to_string(ratio) +
                           " of their parent; raise eta"),
        ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chunked parallel loop. Work items must be independent and write only
// caller-owned slots.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned jobs = 0) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += jobs) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sparsedom
