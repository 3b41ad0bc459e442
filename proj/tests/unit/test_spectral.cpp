#include "doctest.h"

#include "chainlab/potential.hpp"
#include "chainlab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace chainlab;
using std::numbers::pi;

namespace {

std::vector<double> random_sites(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("forward transform matches the direct DFT over centered labels") {
  const int n = 16;
  auto v = random_sites(n, 1);
  WaveSpectrum s = forward_transform(v);
  for (int a = 0; a < n; ++a) {
    cplx direct = 0.0;
    for (int i = 0; i < n; ++i) direct += v[i] * std::polar(1.0, -2 * pi * s.grid.k(a) * (i - n / 2));
    CHECK(std::abs(s.values[a] - direct) < 1e-12);
  }
  CHECK(s.grid.k(0) == -0.5);
  CHECK(s.grid.k(n / 2) == 0.0);
}

TEST_CASE("Parseval and round trip") {
  for (int n : {8, 64, 1024}) {
    auto v = random_sites(n, n);
    WaveSpectrum s = forward_transform(v);
    double site = 0.0, freq = 0.0;
    for (double x : v) site += x * x;
    for (auto c : s.values) freq += std::norm(c);
    CHECK(freq / n == doctest::Approx(site).epsilon(1e-12));
    double imag = 1.0;
    auto back = inverse_real(s, &imag);
    CHECK(imag < 1e-12);
    for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(forward_transform(std::vector<double>(7)), std::invalid_argument);
}

TEST_CASE("Hilbert applied twice is minus the identity off k = 0 and the Nyquist mode") {
  WaveSpectrum s = forward_transform(random_sites(32, 5));
  WaveSpectrum h2 = apply_hilbert(apply_hilbert(s));
  for (int a = 0; a < 32; ++a) {
    if (a == 0 || a == s.grid.zero_index()) CHECK(std::abs(h2.values[a]) == 0.0);
    else CHECK(std::abs(h2.values[a] + s.values[a]) < 1e-15);
  }
  CHECK(hilbert_multiplier(0.25) == cplx(0.0, -1.0));
  CHECK(hilbert_multiplier(-0.25) == cplx(0.0, 1.0));
}

TEST_CASE("semigroup multipliers are unitary and compose") {
  for (double theta : {2.5, 3.0, 3.5, 5.0}) {
    for (double xi : {-7.0, -0.5, 0.0, 1.0, 13.0}) {
      cplx a = semigroup_multiplier(xi, 0.3, +1, theta);
      cplx b = semigroup_multiplier(xi, 0.5, +1, theta);
      CHECK(std::abs(std::abs(a) - 1.0) < 1e-15);
      CHECK(std::abs(a * b - semigroup_multiplier(xi, 0.8, +1, theta)) < 1e-13);
      CHECK(std::abs(a * semigroup_multiplier(xi, 0.3, -1, theta) - 1.0) < 1e-15);
    }
  }
  // generator is sqrt(C1) times the D_theta symbol
  double xi = 3.0, t = 1e-7;
  cplx slope = (semigroup_multiplier(xi, t, +1, 2.5) - 1.0) / t;
  cplx gen = std::sqrt(const_c1(2.5)) * d_theta_multiplier(xi, 2.5);
  // |e^{is} - 1 - is| <= s^2 / 2, plus cancellation in the difference quotient
  CHECK(std::abs(slope - gen) <= 0.5 * t * std::norm(gen) + 1e-8);
}

TEST_CASE("D multipliers") {
  CHECK(d_theta_multiplier(2.0, 3.5) == cplx(0.0, 4 * pi));
  CHECK(d_theta_multiplier(-2.0, 2.5).imag() == doctest::Approx(-std::pow(4 * pi, 0.75)));
  CHECK(d_theta_multiplier(0.0, 2.5) == cplx(0.0));
  double a = 2 * pi * 0.01;
  CHECK(d3l_multiplier(0.01).imag() == doctest::Approx(a * std::log(1 / a)));
  CHECK(d3l_multiplier(-0.01).imag() == doctest::Approx(-a * std::log(1 / a)));
}

TEST_CASE("wave and (p, l) round trip on the zero-mean tension subspace") {
  const int n = 64;
  WaveSpectrum p = forward_transform(random_sites(n, 11));
  auto lsites = random_sites(n, 12);
  double mean = 0.0;
  for (double x : lsites) mean += x / n;
  for (double& x : lsites) x -= mean;
  WaveSpectrum l = forward_transform(lsites);
  l.values[l.grid.zero_index()] = 0.0;
  l.values[0] = 0.0;  // the Nyquist tension mode is not represented
  auto [p2, l2] = wave_to_pl(pl_to_wave(p, l));
  for (int a = 0; a < n; ++a) {
    CHECK(std::abs(p2.values[a] - p.values[a]) < 1e-12);
    CHECK(std::abs(l2.values[a] - l.values[a]) < 1e-12);
  }
  l.values[l.grid.zero_index()] = 1.0;
  CHECK_THROWS_AS(pl_to_wave(p, l), DomainError);
}

TEST_CASE("spectral energy against the (p, l) square sum") {
  const int n = 32;
  WaveSpectrum p = forward_transform(random_sites(n, 3));
  WaveSpectrum l = forward_transform(random_sites(n, 4));
  l.values[l.grid.zero_index()] = 0.0;
  l.values[0] = 0.0;
  double pl = 0.0;
  for (int a = 0; a < n; ++a) pl += std::norm(p.values[a]) + std::norm(l.values[a]);
  CHECK(spectral_energy(pl_to_wave(p, l)) == doctest::Approx(pl / n).epsilon(1e-12));
}

}
