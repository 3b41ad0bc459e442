#include "doctest.h"

#include "chainlab/meanflow.hpp"
#include "chainlab/potential.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace chainlab;
using std::numbers::pi;

namespace {

ModeMatrix random_matrix(std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  ModeMatrix m;
  for (auto& v : m.e) v = cplx(d(gen), d(gen));
  return m;
}

double gap(const ModeMatrix& a, const ModeMatrix& b) { return opnorm2(a - b); }

}  // namespace

TEST_SUITE("meanflow") {

TEST_CASE("schedule case values") {
  double e = std::ldexp(1.0, -10);
  ScalingSchedule s = schedule(2.5);
  CHECK(s.j(e) == doctest::Approx(std::pow(2.0, -7.5)).epsilon(1e-14));
  CHECK(s.b(e) == doctest::Approx(std::pow(2.0, -5)).epsilon(1e-14));
  CHECK(s.m(e) == doctest::Approx(std::sqrt(e)).epsilon(1e-14));
  CHECK(s.n(e) == doctest::Approx(std::pow(e, 1.25)).epsilon(1e-14));
  ScalingSchedule h = schedule(6.0);
  CHECK(h.m(1e-3) == doctest::Approx(1e-3));
  CHECK(h.n(1e-3) == doctest::Approx(1e-6));
  CHECK(h.b(1e-3) == doctest::Approx(1e-6));
  CHECK(h.r(1e-3) == doctest::Approx(1e-3));
  CHECK_THROWS_AS(schedule(2.0).m(0.1), DomainError);
  CHECK_THROWS_AS(schedule(2.5).j(1.0), DomainError);
}

TEST_CASE("n / m = j across theta and eps") {
  for (double theta : {2.1, 2.5, 2.9, 3.0, 3.1, 3.5, 4.0, 4.5, 5.0, 6.0}) {
    ScalingSchedule s = schedule(theta);
    for (int e = 4; e <= 30; e += 2) {
      double eps = std::ldexp(1.0, -e);
      CHECK(std::abs(s.n(eps) / s.m(eps) / s.j(eps) - 1.0) <= 1e-15);
    }
  }
}

TEST_CASE("2x2 algebra") {
  ModeMatrix a;
  a.e = {cplx(1, 2), cplx(3, 0), cplx(0, -1), cplx(2, 2)};
  auto lam = eigenvalues(a);
  CHECK(std::abs(lam[0] + lam[1] - a.trace()) < 1e-14);
  CHECK(std::abs(lam[0] * lam[1] - a.det()) < 1e-13);
  ModeMatrix d;
  d.e = {3.0, 0.0, 0.0, 1.0};
  CHECK(opnorm2(d) == doctest::Approx(3.0));
  ModeMatrix n;
  n.e = {0.0, 2.0, 0.0, 0.0};
  CHECK(opnorm2(n) == doctest::Approx(2.0));
}

TEST_CASE("expm2 agrees with the Taylor oracle") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    ModeMatrix a = random_matrix(gen, trial % 2 ? 1.0 : 5.0);
    for (double t : {0.0, 0.01, 0.5, 1.3}) {
      ModeMatrix x = expm2(a, t), y = expm_taylor(a, t);
      CHECK(gap(x, y) <= 1e-10 * std::max(1.0, opnorm2(y)));
    }
  }
  // defective matrix: [[l, 1], [0, l]] has exp = e^{lt} [[1, t], [0, 1]]
  ModeMatrix j;
  j.e = {cplx(-0.3, 1.0), 1.0, 0.0, cplx(-0.3, 1.0)};
  ModeMatrix ex = expm2(j, 2.0);
  cplx el = std::exp(cplx(-0.3, 1.0) * 2.0);
  CHECK(std::abs(ex(0, 0) - el) < 1e-13);
  CHECK(std::abs(ex(0, 1) - 2.0 * el) < 1e-12);
  CHECK(std::abs(ex(1, 0)) < 1e-13);
}

TEST_CASE("expm2 semigroup property") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    ModeMatrix a = random_matrix(gen, 2.0);
    ModeMatrix lhs = expm2(a, 0.7);
    ModeMatrix rhs = expm2(a, 0.3) * expm2(a, 0.4);
    CHECK(gap(lhs, rhs) <= 1e-11 * std::max(1.0, opnorm2(lhs)));
  }
}

TEST_CASE("mean generator converges to the wave generator") {
  for (double theta : {1.5, 2.5, 3.5, 4.5, 6.0}) {
    double k = 0.8;
    double coarse = opnorm2(b_rem(k, std::ldexp(1.0, -10), theta, 0.0));
    double fine = opnorm2(b_rem(k, std::ldexp(1.0, -30), theta, 0.0));
    CAPTURE(theta);
    CHECK(fine < coarse);
    CHECK(fine < 1e-2);
  }
  ModeMatrix lim = a_limit(2.0, 3.5);
  CHECK(std::abs(lim(0, 1) - cplx(0.0, std::sqrt(const_c1(3.5)) * 4 * pi)) < 1e-12);
  CHECK(lim(0, 0) == cplx(0.0));
}

TEST_CASE("recentered generator converges to the corrected limit") {
  for (double theta : {2.5, 3.0, 3.5, 4.5, 6.0}) {
    for (double gamma : {0.0, 1.0}) {
      double k = 0.6;
      double r_coarse = opnorm2(rem(k, std::ldexp(1.0, -12), theta, gamma));
      double r_fine = opnorm2(rem(k, std::ldexp(1.0, -36), theta, gamma));
      CAPTURE(theta);
      CAPTURE(gamma);
      CHECK(r_fine < r_coarse);
      CHECK(r_fine < (theta == 3.0 ? 0.05 : 1e-3));
    }
  }
}

TEST_CASE("as-printed limit generator stays a fixed distance away") {
  // the printed correction coefficient is twice the one the expansion of omega produces
  double k = 0.6, theta = 3.5;
  double a = 2 * pi * k;
  double expected = std::abs(const_c2(theta)) / (2.0 * std::sqrt(const_c1(theta))) * std::pow(a, theta - 2.0);
  for (int e : {20, 30, 40}) {
    double eps = std::ldexp(1.0, -e);
    CHECK(opnorm2(m_eps(k, eps, theta, 0.0) - m_limit_printed(k, theta, 0.0)) ==
          doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("theta = 4 recentering is exact without noise") {
  // omega is exactly linear minus quadratic in 2 pi |k| there
  for (double k : {0.3, 1.0, 5.0}) {
    for (int e : {8, 12, 16}) {
      double eps = std::ldexp(1.0, -e);
      ModeMatrix me = m_eps(k, eps, 4.0, 0.0);
      CHECK(gap(me, m_limit(k, 4.0, 0.0)) <= 1e-9 * std::max(1.0, opnorm2(me)) / eps);
    }
  }
}

TEST_CASE("limit generators are dissipative") {
  for (double theta : {2.5, 3.0, 3.5, 4.0, 4.5, 6.0}) {
    for (double xi : {-9.0, -0.5, 0.25, 3.0}) {
      for (auto lam : eigenvalues(m_limit(xi, theta, 1.0))) CHECK(lam.real() <= 1e-12);
      for (double t : {0.1, 1.0, 10.0}) {
        ModeMatrix m = m_limit(xi, theta, 1.0);
        // roundoff in the exponential grows with |M t|
        CHECK(opnorm2(expm2(m, t)) <= 1.0 + 1e-14 * std::max(1.0, opnorm2(m) * t));
      }
    }
  }
}

TEST_CASE("evolve_modes applies the generator mode by mode") {
  std::vector<double> xi{-2.0, 1.0, 3.0};
  std::vector<cplx> u{1.0, cplx(0, 1), 2.0}, v{0.5, 1.0, cplx(1, 1)};
  auto u0 = u, v0 = v;
  Generator g = [](double x) { return a_limit(x, 2.5); };
  evolve_modes(xi, u, v, g, 0.4);
  for (int i = 0; i < 3; ++i) {
    auto w = expm_taylor(a_limit(xi[i], 2.5), 0.4).apply({u0[i], v0[i]});
    CHECK(std::abs(w[0] - u[i]) < 1e-12);
    CHECK(std::abs(w[1] - v[i]) < 1e-12);
  }
}

}
