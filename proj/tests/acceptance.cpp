// Acceptance checks, one criterion per invocation: acceptance <n>.
// Prints one PASS/FAIL line per sub-check and a final verdict line; exit status 0 iff all pass.
#include "chainlab/harness.hpp"
#include "chainlab/meanflow.hpp"
#include "chainlab/microsim.hpp"
#include "chainlab/potential.hpp"
#include "chainlab/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace chainlab;

namespace {

struct Tally {
  int failed = 0;
  void check(bool ok, const std::string& what, const std::string& detail = "") {
    if (!ok) ++failed;
    std::cout << (ok ? "  PASS  " : "  FAIL  ") << what;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << '\n';
  }
  void info(const std::string& what) { std::cout << "  info  " << what << '\n'; }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// direct partial sum with integral tail
double zeta_direct(double s) {
  const long n = 1000000;
  double acc = 0.0;
  for (long x = n; x >= 1; --x) acc += std::pow(static_cast<double>(x), -s);
  return acc + std::pow(n + 0.5, 1.0 - s) / (s - 1.0);
}

void absorb(Tally& t, const ConvergenceReport& rep, const std::string& prefix) {
  for (const auto& f : rep.flags) t.check(f.pass, prefix + f.name, f.detail);
  for (const auto& s : rep.slopes) {
    std::string d = "slope " + num(s.fit.slope) + " expected " + num(s.expected) + " +- " + num(s.tolerance);
    if (s.asserted) t.check(s.pass, prefix + s.name, d);
    else t.info(prefix + s.name + " (reported) " + d);
  }
}

ExperimentConfig experiment(const std::string& kind, double theta, double gamma, std::vector<int> sites) {
  ExperimentConfig c;
  c.experiment = kind;
  c.theta = theta;
  c.gamma = gamma;
  c.sites = std::move(sites);
  return c;
}

const std::vector<int> halvings4{512, 1024, 2048, 4096, 8192};
const std::vector<int> desk{1024, 2048, 4096};

void c1(Tally& t) {
  double a = const_c1(3.0), b = const_c2(3.0), c = const_c2(5.0);
  t.check(std::abs(a - 1.0) <= 1e-10, "const_c1(3) = 1", num(a));
  t.check(std::abs(b - 1.5) <= 1e-8, "const_c2(3) = 1.5", num(b));
  t.check(std::abs(c + 1.0 / 12.0) <= 1e-8, "const_c2(5) = -1/12", num(c));
  double z4 = zeta_direct(4.0), z2 = zeta_direct(2.0), v = const_c1(4.0);
  // the small-k coefficient at theta = 4 is zeta(theta - 2); see the decisions ledger
  t.check(std::abs(v - z4) <= 1e-10, "const_c1(4) equals direct-sum zeta(4)",
          "const_c1(4) " + num(v) + ", zeta(4) " + num(z4));
  t.info("const_c1(4) - direct-sum zeta(2) = " + num(v - z2));
}

void c2(Tally& t) { absorb(t, dispersion_asymptotics({1.5, 2.5, 3.0, 3.5, 4.5, 6.0}), ""); }

ConvergenceReport bounds_report() {
  static ConvergenceReport rep = verify_bounds(BoundsConfig{});
  return rep;
}

void c3(Tally& t) {
  for (const auto& f : bounds_report().flags)
    if (f.name.rfind("exp_norm_pin", 0) == 0 || f.name.rfind("eigen_real_nonpositive", 0) == 0)
      t.check(f.pass, f.name, f.detail);
}

void c4(Tally& t) {
  ConvergenceReport rep = bounds_report();
  for (const auto& s : rep.slopes) {
    std::string d = "slope " + num(s.fit.slope) + " expected " + num(s.expected) + " +- " + num(s.tolerance);
    if (s.asserted) t.check(s.pass, s.name, d);
    else t.info(s.name + " (reported) " + d);
  }
  for (const auto& f : rep.flags)
    if (f.name.rfind("envelope_band", 0) == 0) t.check(f.pass, f.name, f.detail);
  // B changes monotonicity across theta = 3: b exponent 3 - theta below, theta - 3 above
  t.check(b_rate(2.5).exponent > 0 && b_rate(2.9).exponent < b_rate(2.5).exponent &&
              b_rate(3.5).exponent > b_rate(3.1).exponent,
          "b exponent decreases toward theta = 3 and increases past it");
}

void c5(Tally& t) {
  SimConfig cfg;
  cfg.n_sites = 4096;
  cfg.theta = 2.5;
  cfg.gamma = 1.0;
  cfg.seed = 2024;
  Chain chain(cfg);
  InitialProfiles prof = make_initial_profiles("bump_pair");
  ChainState s = chain.init_phononic(prof.p0, prof.l0);
  double e0 = chain.total_energy(s), m0 = chain.total_momentum(s);
  for (int i = 0; i < 10000; ++i) chain.step(s, chain.dt());
  double de = std::abs(chain.total_energy(s) - e0) / e0;
  double dm = std::abs(chain.total_momentum(s) - m0) / std::abs(m0);
  t.check(de <= 1e-9, "relative energy drift over 1e4 steps <= 1e-9", num(de));
  t.check(dm <= 1e-12, "momentum drift over 1e4 steps <= 1e-12", num(dm) + " (initial " + num(m0) + ")");
  t.check(chain.dt() == 0.4 / chain.dispersion().omega_max, "dt = 0.4 / omega_max");
}

void c6(Tally& t) {
  for (double theta : {2.5, 3.5}) {
    ExperimentConfig c = experiment("micro", theta, 1.0, desk);
    c.replicas = 8;
    absorb(t, run_experiment(c), "theta=" + num(theta) + " ");
  }
}

void c7(Tally& t) {
  // the noise entry of B is of order gamma eps^2 / j, which outruns the b-table rate for theta > 4;
  // the table rate is asserted on the deterministic part there and the gamma = 1 run is reported
  for (double theta : {2.5, 3.5})
    absorb(t, run_experiment(experiment("mean", theta, 1.0, halvings4)), "theta=" + num(theta) + " gamma=1 ");
  for (double theta : {4.5, 6.0}) {
    absorb(t, run_experiment(experiment("mean", theta, 0.0, halvings4)), "theta=" + num(theta) + " gamma=0 ");
    ConvergenceReport noisy = run_experiment(experiment("mean", theta, 1.0, halvings4));
    for (const auto& f : noisy.flags)
      if (f.name.rfind("ratio_band", 0) == 0)
        t.info("theta=" + num(theta) + " gamma=1 " + f.name + " " + (f.pass ? "within" : "outside") + " band (" +
               f.detail + ")");
  }
}

void c8(Tally& t) {
  for (double theta : {2.5, 3.5})
    absorb(t, run_experiment(experiment("energy", theta, 1.0, {desk.back()})), "theta=" + num(theta) + " ");
}

void c9(Tally& t) {
  for (double theta : {2.5, 3.5, 4.5})
    absorb(t, run_experiment(experiment("fluc", theta, 1.0, halvings4)), "theta=" + num(theta) + " ");
}

void c10(Tally& t) {
  ExperimentConfig c = experiment("lln", 2.5, 1.0, desk);
  c.replicas = 32;
  absorb(t, run_experiment(c), "");
}

void c11(Tally& t) {
  double worst = 0.0;
  int cells = 0;
  for (double theta : {2.1, 2.5, 2.9, 3.0, 3.1, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0})
    for (int e = 2; e <= 40; ++e) {
      double eps = std::ldexp(1.0, -e);
      ScalingSchedule s = schedule(theta);
      worst = std::max(worst, std::abs(s.n(eps) / s.m(eps) - s.j(eps)) / s.j(eps));
      ++cells;
    }
  for (double eps : {1e-3, 1e-6, 0.3}) {
    ScalingSchedule s = schedule(3.0);
    worst = std::max(worst, std::abs(s.n(eps) / s.m(eps) - s.j(eps)) / s.j(eps));
  }
  t.check(worst <= 1e-15, "n/m = j over " + std::to_string(cells) + " (theta, eps) cells", "worst " + num(worst));
}

void c12(Tally& t) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> d;
  double parseval = 0.0, hilbert = 0.0, roundtrip = 0.0, modulus = 0.0;
  for (int n : {16, 256, 4096}) {
    std::vector<double> v(n), w(n);
    for (auto& x : v) x = d(gen);
    double mean = 0.0;
    for (auto& x : w) mean += (x = d(gen)) / n;
    for (auto& x : w) x -= mean;
    WaveSpectrum s = forward_transform(v);
    double site = 0.0, freq = 0.0;
    for (double x : v) site += x * x;
    for (auto c : s.values) freq += std::norm(c);
    parseval = std::max(parseval, std::abs(freq / n - site) / site);
    WaveSpectrum h = apply_hilbert(apply_hilbert(s));
    for (int a = 0; a < n; ++a)
      if (a != 0 && a != s.grid.zero_index()) hilbert = std::max(hilbert, std::abs(h.values[a] + s.values[a]));
    WaveSpectrum l = forward_transform(w);
    l.values[l.grid.zero_index()] = 0.0;
    l.values[0] = 0.0;
    auto [p2, l2] = wave_to_pl(pl_to_wave(s, l));
    for (int a = 0; a < n; ++a)
      roundtrip = std::max(roundtrip, std::max(std::abs(p2.values[a] - s.values[a]), std::abs(l2.values[a] - l.values[a])));
  }
  for (double theta : {1.5, 2.5, 3.0, 3.5, 6.0})
    for (double xi = -50.0; xi <= 50.0; xi += 0.25)
      for (int sign : {-1, 1})
        modulus = std::max(modulus, std::abs(std::abs(semigroup_multiplier(xi, 0.7, sign, theta)) - 1.0));
  t.check(parseval <= 1e-12, "Parseval", num(parseval));
  t.check(hilbert <= 1e-12, "Hilbert twice = -identity off k=0 and the Nyquist mode", num(hilbert));
  t.check(modulus <= 1e-15, "semigroup multipliers unit modulus", num(modulus));
  t.check(roundtrip <= 1e-12, "wave/(p,l) round trip on the zero-mean tension subspace", num(roundtrip));
}

struct Criterion {
  std::string title;
  double budget_s;
  std::function<void(Tally&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::map<int, Criterion> all{
      {1, {"asymptotic constants", 5, c1}},
      {2, {"dispersion asymptotics", 30, c2}},
      {3, {"operator-norm bounds", 60, c3}},
      {4, {"remainder rates", 120, c4}},
      {5, {"exact micro conservation", 120, c5}},
      {6, {"superballistic limit at desk scale", 600, c6}},
      {7, {"mean-dynamics rate", 60, c7}},
      {8, {"energy limit", 600, c8}},
      {9, {"recentered mean path", 120, c9}},
      {10, {"law of large numbers", 600, c10}},
      {11, {"schedule identity", 1, c11}},
      {12, {"spectral property suite", 10, c12}},
  };
  if (argc != 2 || !all.count(std::atoi(argv[1]))) {
    std::cerr << "usage: acceptance <1..12>\n";
    return 2;
  }
  int id = std::atoi(argv[1]);
  const Criterion& c = all.at(id);
  std::cout << "criterion " << id << ": " << c.title << '\n';
  Tally t;
  auto start = std::chrono::steady_clock::now();
  try {
    c.run(t);
  } catch (const std::exception& e) {
    t.check(false, "no exception", e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.check(secs < c.budget_s, "runtime under " + num(c.budget_s) + " s", num(secs) + " s");
  std::cout << "criterion " << id << " " << (t.failed == 0 ? "PASS" : "FAIL") << '\n';
  return t.failed == 0 ? 0 : 1;
}
