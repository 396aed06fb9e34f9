#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sparsedom/exponents.hpp"

using namespace sparsedom;

namespace {

// Random admissible (p0, q0, p); q0 = inf with positive probability.
struct ConfigSampler {
  std::mt19937_64 rng{20240517};
  std::uniform_real_distribution<double> u01{0.0, 1.0};

  ExponentConfig next() {
    const double p0 = 1.0 + 0.98 * u01(rng);
    double q0;
    if (u01(rng) < 0.2) {
      q0 = kInf;
    } else {
      q0 = 2.0 + 0.05 + 30.0 * u01(rng);
    }
    const double hi = std::isinf(q0) ? p0 + 30.0 : q0;
    const double p = p0 + (hi - p0) * (0.02 + 0.96 * u01(rng));
    return make_config(p0, q0, p);
  }
};

}  // namespace

TEST_CASE("conjugate exponents") {
  CHECK(conjugate(2.0) == 2.0);
  CHECK(conjugate(4.0 / 3.0) == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(std::isinf(conjugate(1.0)));
  CHECK(conjugate(kInf) == 1.0);
  CHECK_THROWS_AS(conjugate(0.5), std::domain_error);
  CHECK_THROWS_AS(conjugate(-3.0), std::domain_error);
}

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(4.0 / 3.0, 4.0) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(critical_exponent(1.0, kInf) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(critical_exponent(1.0, 2.5) == Catch::Approx(1.6).epsilon(1e-14));
}

TEST_CASE("configuration examples") {
  const auto a = make_config(1.0, kInf, 1.5);
  CHECK(a.alpha == Catch::Approx(2.0).epsilon(1e-13));

  const auto b = make_config(1.0, kInf, 3.0);
  CHECK(b.alpha == Catch::Approx(1.0).epsilon(1e-13));

  const auto c = make_config(4.0 / 3.0, 4.0, 2.0);
  CHECK(c.frak_p == Catch::Approx(2.0).epsilon(1e-13));
  CHECK(c.r == Catch::Approx(2.0).epsilon(1e-13));
  CHECK(c.delta == Catch::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(c.alpha == Catch::Approx(1.5).epsilon(1e-13));

  const auto d = make_config(1.0, 4.0, 1.5);
  CHECK(d.q0_conj == Catch::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(d.frak_p == Catch::Approx(1.75).epsilon(1e-13));
  CHECK(d.p < d.frak_p);
  CHECK(d.alpha == Catch::Approx(1.0 / (d.p - d.p0)).epsilon(1e-13));
}

TEST_CASE("configuration rejects bad orderings") {
  CHECK_THROWS_MATCHES(make_config(0.9, 4.0, 2.0), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("1 <= p0")));
  CHECK_THROWS_MATCHES(make_config(2.0, 4.0, 3.0), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("p0 < 2")));
  CHECK_THROWS_MATCHES(make_config(1.5, 1.9, 1.7), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("2 < q0")));
  CHECK_THROWS_MATCHES(make_config(1.5, 4.0, 1.2), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("p0 < p")));
  CHECK_THROWS_MATCHES(make_config(1.5, 4.0, 5.0), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("p < q0")));
}

TEST_CASE("derived-exponent identities over random configurations") {
  ConfigSampler sampler;
  for (int i = 0; i < 10000; ++i) {
    const ExponentConfig c = sampler.next();

    // the two alpha routes agree
    const double via_max = alpha_branch_max(c.p0, c.q0, c.p);
    REQUIRE(std::fabs(c.alpha - via_max) <= 1e-12 * via_max);

    // beta changes sign exactly at the critical exponent, together with the
    // branch of delta
    if (c.p > c.frak_p + 1e-12) {
      REQUIRE(c.beta < 1e-12);
      REQUIRE(c.delta == c.q0_conj);
    } else if (c.p < c.frak_p - 1e-12) {
      REQUIRE(c.beta > -1e-12);
      REQUIRE(c.delta == c.p0 * (c.r - 1.0));
    }

    // beta_bar = 1/q0' - 1/(p0(r-1)) factors as -beta/(r-1); the advertised
    // -(r-1)beta misprints r for r', since r' - 1 = 1/(r - 1).
    const double expected = -c.beta / (c.r - 1.0);
    REQUIRE(std::fabs(c.beta_bar - expected) <=
            1e-12 * std::max(1.0, std::fabs(expected)));

    // r > 1, delta > 0
    REQUIRE(c.r > 1.0);
    REQUIRE(c.delta > 0.0);

    // gamma lands in (0,1] on the upper branch
    if (c.beta <= 0.0) {
      REQUIRE(c.gamma > 0.0);
      REQUIRE(c.gamma <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("alpha is continuous at the critical exponent") {
  ConfigSampler sampler;
  for (int i = 0; i < 200; ++i) {
    const ExponentConfig c = sampler.next();
    const double fp = c.frak_p;
    const double lower_branch = 1.0 / (fp - c.p0);
    const double upper_branch =
        std::isinf(c.q0) ? 1.0 : (c.q0 - 1.0) / (c.q0 - fp);
    REQUIRE(std::fabs(lower_branch - upper_branch) <= 1e-12 * lower_branch);
  }
}
