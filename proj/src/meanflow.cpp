#include "chainlab/meanflow.hpp"

#include "chainlab/potential.hpp"

#include <cmath>
#include <numbers>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
}

void need_above(double theta, double lo, const char* what) {
  if (!(theta > lo)) throw DomainError(std::string(what) + " requires theta > " + std::to_string(lo));
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// omega(eps k) with eps k reduced onto the torus, and the matching lattice sign
struct Scaled {
  double omega;
  double sign;
  double rate;  // R(eps k)
};

Scaled scaled_mode(double k, double eps, double theta) {
  double kr = reduce_frequency(eps * k);
  return {omega(kr, PotentialSpec{theta}), lattice_sign(kr), noise_rate_R(kr)};
}

// (e^z - 1)/z, accurate near z = 0
cplx phi1(cplx z) {
  if (std::abs(z) < 1e-3) {
    cplx term = 1.0, acc = 1.0;
    for (int n = 2; n < 10; ++n) {
      term *= z / static_cast<double>(n);
      acc += term;
    }
    return acc;
  }
  return (std::exp(z) - 1.0) / z;
}

}  // namespace

double ScalingSchedule::j(double eps) const {
  check_eps(eps);
  need_above(theta, 1.0, "j");
  if (theta < 3.0) return std::pow(eps, (theta - 1.0) / 2.0);
  if (theta == 3.0) return eps * std::sqrt(std::log(1.0 / eps));
  return eps;
}

double ScalingSchedule::m(double eps) const {
  check_eps(eps);
  need_above(theta, 2.0, "m");
  if (theta < 3.0) return std::pow(eps, 3.0 - theta);
  if (theta == 3.0) return 1.0 / std::log(1.0 / eps);
  if (theta <= 4.0) return std::pow(eps, theta - 3.0);
  return eps;
}

double ScalingSchedule::n(double eps) const {
  check_eps(eps);
  need_above(theta, 2.0, "n");
  if (theta < 3.0) return std::pow(eps, (5.0 - theta) / 2.0);
  if (theta == 3.0) return eps / std::sqrt(std::log(1.0 / eps));
  if (theta <= 4.0) return std::pow(eps, theta - 2.0);
  return eps * eps;
}

namespace {
double envelope(RateLaw law, double eps) {
  double lg = std::log(1.0 / eps);
  if (law.log_power < 0) return 1.0 / lg;
  double v = std::pow(eps, law.exponent);
  return law.log_power > 0 ? v * lg : v;
}
}  // namespace

double ScalingSchedule::b(double eps) const {
  check_eps(eps);
  return envelope(b_rate(theta), eps);
}

double ScalingSchedule::r(double eps) const {
  check_eps(eps);
  return envelope(r_rate(theta), eps);
}

ScalingSchedule schedule(double theta) {
  need_above(theta, 1.0, "schedule");
  return ScalingSchedule{theta};
}

RateLaw b_rate(double theta) {
  need_above(theta, 1.0, "b");
  if (theta < 2.0) return {1.0, 0};
  if (theta == 2.0) return {1.0, 1};
  if (theta < 3.0) return {3.0 - theta, 0};
  if (theta == 3.0) return {0.0, -1};
  if (theta < 4.0) return {theta - 3.0, 0};
  if (theta == 4.0) return {1.0, 0};
  if (theta < 5.0) return {theta - 3.0, 0};
  if (theta == 5.0) return {2.0, 1};
  return {2.0, 0};
}

RateLaw r_rate(double theta) {
  need_above(theta, 2.0, "r");
  if (theta <= 2.5) return {theta - 2.0, 0};
  if (theta < 3.0) return {3.0 - theta, 0};
  if (theta == 3.0) return {0.0, -1};
  if (theta <= 3.5) return {theta - 3.0, 0};
  if (theta < 4.0) return {4.0 - theta, 0};
  if (theta == 4.0) return {1.0, 1};
  if (theta < 5.0) return {theta - 4.0, 0};
  if (theta == 5.0) return {1.0, 1};
  return {1.0, 0};
}

ModeMatrix ModeMatrix::identity() {
  ModeMatrix m;
  m.e = {1.0, 0.0, 0.0, 1.0};
  return m;
}

ModeMatrix ModeMatrix::operator+(const ModeMatrix& o) const {
  ModeMatrix r;
  for (int i = 0; i < 4; ++i) r.e[i] = e[i] + o.e[i];
  return r;
}

ModeMatrix ModeMatrix::operator-(const ModeMatrix& o) const {
  ModeMatrix r;
  for (int i = 0; i < 4; ++i) r.e[i] = e[i] - o.e[i];
  return r;
}

ModeMatrix ModeMatrix::operator*(const ModeMatrix& o) const {
  ModeMatrix r;
  r.e[0] = e[0] * o.e[0] + e[1] * o.e[2];
  r.e[1] = e[0] * o.e[1] + e[1] * o.e[3];
  r.e[2] = e[2] * o.e[0] + e[3] * o.e[2];
  r.e[3] = e[2] * o.e[1] + e[3] * o.e[3];
  return r;
}

ModeMatrix ModeMatrix::operator*(cplx s) const {
  ModeMatrix r;
  for (int i = 0; i < 4; ++i) r.e[i] = e[i] * s;
  return r;
}

std::array<cplx, 2> ModeMatrix::apply(const std::array<cplx, 2>& v) const {
  return {e[0] * v[0] + e[1] * v[1], e[2] * v[0] + e[3] * v[1]};
}

std::array<cplx, 2> eigenvalues(const ModeMatrix& a) {
  cplx mid = 0.5 * a.trace();
  cplx half_gap = 0.5 * (a(0, 0) - a(1, 1));
  cplx d = std::sqrt(half_gap * half_gap + a(0, 1) * a(1, 0));
  return {mid + d, mid - d};
}

ModeMatrix a_eps(double k, double eps, double theta, double gamma) {
  check_eps(eps);
  const double j = schedule(theta).j(eps);
  Scaled s = scaled_mode(k, eps, theta);
  ModeMatrix a;
  a(0, 0) = -2.0 * gamma * s.rate / j;
  a(0, 1) = a(1, 0) = I * (s.sign * s.omega / j);
  a(1, 1) = 0.0;
  return a;
}

ModeMatrix a_limit(double k, double theta) {
  need_above(theta, 1.0, "a_limit");
  ModeMatrix a;
  double w = std::sqrt(const_c1(theta)) * std::pow(2.0 * pi * std::abs(k), wave_exponent(theta));
  a(0, 1) = a(1, 0) = I * (sgn(k) * w);
  return a;
}

ModeMatrix b_rem(double k, double eps, double theta, double gamma) {
  return a_eps(k, eps, theta, gamma) - a_limit(k, theta);
}

ModeMatrix m_eps(double k, double eps, double theta, double gamma) {
  need_above(theta, 2.0, "m_eps");
  check_eps(eps);
  ScalingSchedule sc = schedule(theta);
  const double n = sc.n(eps), m = sc.m(eps);
  Scaled s = scaled_mode(k, eps, theta);
  double front = std::sqrt(const_c1(theta)) * std::pow(2.0 * pi * std::abs(k), wave_exponent(theta));
  double phase = s.sign * s.omega / n - sgn(k) * front / m;
  double damp = gamma * s.rate / n;
  ModeMatrix out;
  out(0, 0) = cplx(-damp, phase);
  out(1, 1) = cplx(-damp, -phase);
  out(0, 1) = out(1, 0) = -damp;
  return out;
}

ModeMatrix m_limit(double xi, double theta, double gamma) {
  need_above(theta, 2.0, "m_limit");
  ModeMatrix out;
  if (xi == 0.0) return out;
  const double s = sgn(xi);
  const double a = 2.0 * pi * std::abs(xi);
  const double c1 = const_c1(theta), c2 = const_c2(theta);
  // first correction of omega(eps k)/n beyond the recentering phase
  const double coef = c2 / (2.0 * std::sqrt(c1));
  double phase = 0.0, damp = 0.0;
  if (theta < 3.0) {
    phase = coef * std::pow(a, (5.0 - theta) / 2.0);
  } else if (theta == 3.0) {
    phase = 0.5 * std::sqrt(c1) * a * std::log(1.0 / a) + coef * a;
  } else if (theta < 4.0) {
    phase = coef * std::pow(a, theta - 2.0);
  } else if (theta == 4.0) {
    phase = coef * a * a;
  }
  if (theta >= 4.0) damp = 1.5 * gamma * a * a;
  out(0, 0) = cplx(-damp, s * phase);
  out(1, 1) = cplx(-damp, -s * phase);
  out(0, 1) = out(1, 0) = -damp;
  return out;
}

ModeMatrix m_limit_printed(double xi, double theta, double gamma) {
  need_above(theta, 2.0, "m_limit_printed");
  ModeMatrix out;
  if (xi == 0.0) return out;
  const double s = sgn(xi);
  const double a = 2.0 * pi * std::abs(xi);
  const double c1 = const_c1(theta), c2 = const_c2(theta);
  const double coef = c2 / std::sqrt(c1);
  double phase = 0.0, damp = 0.0;
  if (theta < 3.0) {
    phase = coef * std::pow(a, (5.0 - theta) / 2.0);
  } else if (theta == 3.0) {
    phase = std::sqrt(c1) * a * std::log(1.0 / a) + coef * pi * std::abs(xi);
  } else if (theta < 4.0) {
    phase = coef * std::pow(a, theta - 2.0);
  } else if (theta == 4.0) {
    phase = coef * a * a;
  }
  if (theta >= 4.0) damp = 1.5 * gamma * a * a;
  out(0, 0) = cplx(-damp, s * phase);
  out(1, 1) = cplx(-damp, -s * phase);
  out(0, 1) = out(1, 0) = -damp;
  return out;
}

ModeMatrix rem(double k, double eps, double theta, double gamma) {
  return m_eps(k, eps, theta, gamma) - m_limit(k, theta, gamma);
}

ModeMatrix expm2(const ModeMatrix& a, double t) {
  if (t == 0.0) return ModeMatrix::identity();
  auto lam = eigenvalues(a);
  // anchor on the eigenvalue with the larger real part so e^{(l1 - l2) t} stays bounded
  cplx hi = lam[0], lo = lam[1];
  if (lo.real() > hi.real()) std::swap(hi, lo);
  // exp(At) = e^{hi t} [I + (A - hi I) t phi1((lo - hi) t)]; phi1 switches to its
  // series when the eigenvalues coincide
  ModeMatrix shifted = a - ModeMatrix::identity() * hi;
  ModeMatrix out = ModeMatrix::identity() + shifted * (t * phi1((lo - hi) * t));
  return out * std::exp(hi * t);
}

ModeMatrix expm_taylor(const ModeMatrix& a, double t) {
  ModeMatrix x = a * t;
  double norm = 0.0;
  for (const auto& v : x.e) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  x = x * std::ldexp(1.0, -squarings);
  ModeMatrix term = ModeMatrix::identity(), acc = ModeMatrix::identity();
  for (int n = 1; n < 30; ++n) {
    term = term * x * (1.0 / n);
    acc = acc + term;
    double size = 0.0;
    for (const auto& v : term.e) size = std::max(size, std::abs(v));
    if (size < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) acc = acc * acc;
  return acc;
}

double opnorm2(const ModeMatrix& a) {
  // largest eigenvalue of A^H A from its entries; fro^2 - 4|det|^2 would cancel for near-unitary A
  double p = std::norm(a(0, 0)) + std::norm(a(1, 0));
  double q = std::norm(a(0, 1)) + std::norm(a(1, 1));
  cplx r = std::conj(a(0, 0)) * a(0, 1) + std::conj(a(1, 0)) * a(1, 1);
  return std::sqrt(0.5 * (p + q + std::hypot(p - q, 2.0 * std::abs(r))));
}

void evolve_modes(const std::vector<double>& xi, std::vector<cplx>& u, std::vector<cplx>& v,
                  const Generator& gen, double t) {
  if (u.size() != xi.size() || v.size() != xi.size())
    throw std::invalid_argument("evolve_modes: size mismatch");
  for (std::size_t i = 0; i < xi.size(); ++i) {
    auto w = expm2(gen(xi[i]), t).apply({u[i], v[i]});
    u[i] = w[0];
    v[i] = w[1];
  }
}

}  // namespace chainlab
