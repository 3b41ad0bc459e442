#include "doctest.h"

#include "chainlab/potential.hpp"

#include <cmath>
#include <numbers>

using namespace chainlab;
using std::numbers::pi;

namespace {

// plain partial sum with the integral tail, for s >= 2
double zeta_direct(double s) {
  const long n = 200000;
  double acc = 0.0;
  for (long x = n; x >= 1; --x) acc += std::pow(static_cast<double>(x), -s);
  return acc + std::pow(n + 0.5, 1.0 - s) / (s - 1.0);
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("zeta values") {
  CHECK(zeta_series(2.0) == doctest::Approx(pi * pi / 6).epsilon(1e-13));
  CHECK(zeta_series(4.0) == doctest::Approx(std::pow(pi, 4) / 90).epsilon(1e-13));
  CHECK(zeta_series(3.5) == doctest::Approx(zeta_direct(3.5)).epsilon(1e-11));
  CHECK_THROWS_AS(zeta_series(1.0), DomainError);
}

TEST_CASE("reduce_frequency folds into [-1/2, 1/2)") {
  CHECK(reduce_frequency(0.75) == doctest::Approx(-0.25));
  CHECK(reduce_frequency(0.5) == doctest::Approx(-0.5));
  CHECK(reduce_frequency(-1.25) == doctest::Approx(-0.25));
  CHECK(reduce_frequency(3.0) == 0.0);
}

TEST_CASE("theta = 2 and theta = 4 dispersions are polynomials in 2 pi |k|") {
  // Bernoulli-polynomial closed forms of sum cos(n x) / n^2 and / n^4 on [0, 2 pi]
  for (double k : {0.01, 0.1, 0.23, 0.37, 0.5, -0.3}) {
    double x = 2 * pi * std::abs(k);
    CHECK(alpha_hat(k, {2.0}) == doctest::Approx(pi * x - x * x / 2).epsilon(1e-12));
    double quartic = pi * pi * x * x / 6 - pi * x * x * x / 6 + x * x * x * x / 24;
    CHECK(alpha_hat(k, {4.0}) == doctest::Approx(quartic).epsilon(1e-12));
  }
}

TEST_CASE("closed-form evaluator agrees with the truncated lattice sum") {
  for (double theta : {2.5, 3.0, 3.5, 4.5, 6.0}) {
    PotentialSpec spec{theta};
    for (double k : {0.003, 0.05, 0.2, 0.41, 0.5}) {
      SeriesEstimate s = alpha_hat_series(k, spec);
      CAPTURE(theta);
      CAPTURE(k);
      CHECK(std::abs(alpha_hat(k, spec) - s.value) <= s.error_bound + 1e-10);
    }
  }
}

TEST_CASE("alpha_hat is even, 1-periodic and vanishes at 0") {
  PotentialSpec spec{3.5};
  CHECK(alpha_hat(0.0, spec) == 0.0);
  CHECK(alpha_hat(0.2, spec) == doctest::Approx(alpha_hat(-0.2, spec)).epsilon(1e-14));
  CHECK(alpha_hat(0.2, spec) == doctest::Approx(alpha_hat(1.2, spec)).epsilon(1e-12));
  CHECK(omega(0.3, spec) == doctest::Approx(std::sqrt(alpha_hat(0.3, spec))).epsilon(1e-15));
}

TEST_CASE("asymptotic constants at the tabulated cases") {
  CHECK(const_c1(3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(const_c2(3.0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(const_c2(5.0) == doctest::Approx(-1.0 / 12).epsilon(1e-10));
  // theta > 3: the quadratic coefficient is zeta(theta - 2)
  CHECK(const_c1(4.0) == doctest::Approx(zeta_direct(2.0)).epsilon(1e-10));
  CHECK(const_c1(6.0) == doctest::Approx(zeta_direct(4.0)).epsilon(1e-10));
  CHECK(const_c2(4.0) == doctest::Approx(-pi / 6).epsilon(1e-10));
  CHECK(const_c2(7.0) == doctest::Approx(-zeta_direct(3.0) / 12).epsilon(1e-9));
}

TEST_CASE("leading term fixes the small-k behaviour") {
  for (double theta : {1.5, 2.5, 3.5, 4.5}) {
    AsymptoticConstants c = asymptotic_constants(theta);
    double k = 1e-7;
    double mu = 2 * pi * k;
    CHECK(alpha_hat(k, {theta}) / (c.c1 * std::pow(mu, c.leading_exponent)) == doctest::Approx(1.0).epsilon(1e-3));
  }
  // theta = 3: mu^2 log(1/mu) + 1.5 mu^2
  double mu = 2 * pi * 1e-6;
  CHECK(alpha_hat(1e-6, {3.0}) == doctest::Approx(mu * mu * std::log(1 / mu) + 1.5 * mu * mu).epsilon(1e-6));
}

TEST_CASE("prediction remainder is dominated by its envelope") {
  for (double theta : {2.5, 3.5, 4.5, 6.0}) {
    PotentialSpec spec{theta};
    for (double k : {1e-3, 1e-4, 1e-5}) {
      Prediction p = asymptotic_prediction(k, spec);
      double env = remainder_envelope(2 * pi * k, p.remainder_exponent, p.remainder_has_log);
      CAPTURE(theta);
      CHECK(std::abs(alpha_hat(k, spec) - p.predicted) <= 10 * env);
    }
  }
}

TEST_CASE("noise rate") {
  for (double k : {0.1, 0.25, 0.4}) {
    double s = std::sin(pi * k), s2 = std::sin(2 * pi * k);
    CHECK(noise_rate_R(k) == doctest::Approx(2 * std::pow(s, 4) + 1.5 * s2 * s2));
  }
  CHECK(noise_rate_R(1e-5) == doctest::Approx(1.5 * std::pow(2 * pi * 1e-5, 2)).epsilon(1e-8));
  CHECK(noise_rate_R(0.0) == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(alpha_hat(0.1, {1.0}), DomainError);
  CHECK_THROWS_AS(const_c1(0.5), DomainError);
  CHECK_THROWS_AS(cross_asymptotic_check(0.0, 0.1, {2.5}), DomainError);
}

}
