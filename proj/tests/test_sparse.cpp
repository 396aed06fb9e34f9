#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sparsedom/sparse.hpp"

using namespace sparsedom;

TEST_CASE("packing verifier") {
  SECTION("canonical collection packs at exactly one half") {
    const auto rep = is_sparse(canonical_collection(20));
    CHECK(rep.sparse);
    CHECK(rep.worst_ratio == Catch::Approx(0.5).epsilon(1e-13));
  }
  SECTION("full tiling to depth 3 is not sparse") {
    SparseCollection S;
    for (int k = 0; k <= 3; ++k) {
      for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) {
        S.cubes.push_back(DyadicCube{0, k, m});
      }
    }
    const auto rep = is_sparse(S);
    CHECK_FALSE(rep.sparse);
    CHECK(rep.worst_ratio == Catch::Approx(1.0).epsilon(1e-13));
  }
  SECTION("singleton and empty") {
    CHECK(is_sparse(SparseCollection{{DyadicCube{0, 3, 5}}}).sparse);
    CHECK(is_sparse(SparseCollection{}).sparse);
  }
  SECTION("duplicates count once") {
    SparseCollection S{{DyadicCube{0, 0, 0}, DyadicCube{0, 0, 0},
                        DyadicCube{0, 1, 0}}};
    CHECK(is_sparse(S).worst_ratio == Catch::Approx(0.5).epsilon(1e-13));
  }
  SECTION("mixed-system collections are accepted") {
    SparseCollection S{{DyadicCube{0, 0, 0}, DyadicCube{1, 2, 1}}};
    const auto rep = is_sparse(S);
    CHECK(rep.sparse);
    CHECK(rep.worst_ratio == Catch::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("canonical collection") {
  CHECK(canonical_collection(0).cubes.size() == 1);
  CHECK(canonical_collection(3).cubes.size() == 4);
  const auto S = canonical_collection(3);
  for (int k = 0; k <= 3; ++k) {
    CHECK(S.cubes[k].left() == 0.0);
    CHECK(S.cubes[k].length() == std::ldexp(1.0, -k));
  }
  CHECK_THROWS_AS(canonical_collection(-1), std::invalid_argument);
}

TEST_CASE("bilinear sparse form") {
  const auto cfg = make_config(1.0, kInf, 1.5);

  SECTION("indicator pair gives a plain geometric sum") {
    const auto S = canonical_collection(10);
    const auto one = TestFunction::indicator();
    const double got = sparse_form(S, one, one, cfg, 1.0);
    CHECK(got == Catch::Approx(2.0 - std::ldexp(1.0, -10)).epsilon(1e-14));
  }

  SECTION("closed form against the summed form") {
    const double eps = 0.1;
    const auto f = TestFunction::power(-1.0 + eps);
    const auto g = TestFunction::power(eps);  // -1/p0' + eps with p0 = 1
    const long n_max = 600;
    const double summed =
        sparse_form(canonical_collection(n_max), f, g, cfg, 1.0);
    const double closed = canonical_form_closed(-1.0 + eps, eps, cfg, n_max);
    CHECK(summed == Catch::Approx(closed).epsilon(1e-10));
    const double full = canonical_form_closed(-1.0 + eps, eps, cfg);
    const double expected = 1.0 / (eps * (1.0 + eps) *
                                   (1.0 - std::pow(4.0, -eps)));
    CHECK(full == Catch::Approx(expected).epsilon(1e-12));
    // explicit truncation control at a cutoff short enough for the tail to
    // survive double subtraction
    const long cut = 60;
    const double tail = canonical_form_tail_bound(-1.0 + eps, eps, cfg, cut);
    const double trunc = canonical_form_closed(-1.0 + eps, eps, cfg, cut);
    CHECK(full - trunc == Catch::Approx(tail).epsilon(1e-9));
    CHECK(tail <= expected * std::pow(4.0, -eps * cut));
  }

  SECTION("single-term average at the unit scale") {
    const auto f = TestFunction::power(-0.9);
    CHECK(f.abs_average_pow({0.0, 1.0}, 1.0) ==
          Catch::Approx(10.0).epsilon(1e-13));
  }

  SECTION("per-term identities for the critical pair") {
    for (const auto& [p0, q0] : std::vector<std::pair<double, double>>{
             {1.0, kInf}, {1.0, 4.0}, {1.5, 3.0}, {4.0 / 3.0, 8.0}}) {
      const auto c = make_config(p0, q0, critical_exponent(p0, q0));
      const double eps = 0.01;
      const auto f = TestFunction::power(-1.0 / c.p0 + eps);
      const auto g = TestFunction::power(-1.0 / c.p0_conj + eps);
      for (int n = 0; n <= 40; ++n) {
        const Interval I{0.0, std::ldexp(1.0, -n)};
        const double favg =
            std::pow(f.abs_average_pow(I, c.p0), 1.0 / c.p0);
        const double fref = std::exp2(n / c.p0 - n * eps) /
                            std::pow(c.p0 * eps, 1.0 / c.p0);
        REQUIRE(favg == Catch::Approx(fref).epsilon(1e-12));
        const double gavg = std::pow(g.abs_average_pow(I, c.q0_conj),
                                     1.0 / c.q0_conj);
        const double denom = 1.0 - c.q0_conj / c.p0_conj + c.q0_conj * eps;
        const double gref = std::exp2(n / c.p0_conj - n * eps) /
                            std::pow(denom, 1.0 / c.q0_conj);
        REQUIRE(gavg == Catch::Approx(gref).epsilon(1e-12));
      }
    }
  }

  SECTION("monotone in the collection and homogeneous in f") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    const auto f = TestFunction::power(-0.3);
    const auto g = TestFunction::power(-0.1);
    const auto c = make_config(1.0, 4.0, 2.0);
    SparseCollection S = canonical_collection(6);
    const double base = sparse_form(S, f, g, c, 5.0);
    S.cubes.push_back(DyadicCube{0, 4, 3});
    CHECK(sparse_form(S, f, g, c, 5.0) >= base);
    const double scale = U(rng);
    CHECK(sparse_form(S, f.scaled(scale), g, c, 5.0) ==
          Catch::Approx(scale * sparse_form(S, f, g, c, 5.0)).epsilon(1e-12));
  }

  SECTION("divergent averages propagate") {
    const auto c = make_config(1.5, 4.0, 2.0);
    const auto f = TestFunction::power(-0.9);  // |f|^{1.5} not integrable at 0
    CHECK(std::isinf(
        sparse_form(canonical_collection(2), f, TestFunction::indicator(), c,
                    1.0)));
  }

  SECTION("lambda guard") {
    CHECK_THROWS_AS(sparse_form(canonical_collection(1),
                                TestFunction::indicator(),
                                TestFunction::indicator(),
                                make_config(1, 4, 2), 3.0),
                    std::invalid_argument);
  }
}
