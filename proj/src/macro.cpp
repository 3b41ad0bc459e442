#include "chainlab/macro.hpp"

#include "chainlab/meanflow.hpp"
#include "chainlab/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;

void check_same_grid(const MacroField& a, const MacroField& b) {
  if (a.size() != b.size() || a.half != b.half || a.spacing != b.spacing)
    throw std::invalid_argument("macro fields live on different grids");
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

MacroField::MacroField(int half_, double spacing_) : spacing(spacing_), half(half_), values(2 * half_) {
  if (half_ < 1 || !(spacing_ > 0.0)) throw std::invalid_argument("MacroField needs half >= 1 and spacing > 0");
}

MacroField MacroField::sample(const Transform& f, int half, double spacing) {
  MacroField out(half, spacing);
  for (int i = 0; i < out.size(); ++i) out.values[i] = f(out.xi(i));
  return out;
}

WaveSolution solve_wave(const MacroField& p0, const MacroField& l0, double t, double theta) {
  check_same_grid(p0, l0);
  if (!(theta > 1.0)) throw DomainError("solve_wave requires theta > 1");
  WaveSolution w{p0, l0, theta, t};
  const double speed = std::sqrt(const_c1(theta));
  const double expo = wave_exponent(theta);
  for (int i = 0; i < p0.size(); ++i) {
    double xi = p0.xi(i);
    if (xi == 0.0) continue;
    double phi = speed * std::pow(2.0 * pi * std::abs(xi), expo) * t;
    cplx c = std::cos(phi), s = cplx(0.0, sgn(xi) * std::sin(phi));
    cplx p = p0.values[i], l = l0.values[i];
    w.p_tilde.values[i] = c * p + s * l;
    w.l_tilde.values[i] = s * p + c * l;
  }
  return w;
}

FlucSolution solve_fluc(const MacroField& f0_plus, const MacroField& f0_minus, double t, double theta,
                        double gamma) {
  check_same_grid(f0_plus, f0_minus);
  if (!(theta > 2.0)) throw DomainError("solve_fluc requires theta > 2");
  FlucSolution f{f0_plus, f0_minus, theta, gamma, t};
  for (int i = 0; i < f0_plus.size(); ++i) {
    auto v = expm2(m_limit(f0_plus.xi(i), theta, gamma), t).apply({f0_plus.values[i], f0_minus.values[i]});
    f.f_plus.values[i] = v[0];
    f.f_minus.values[i] = v[1];
  }
  return f;
}

double quadratic_pairing(const MacroField& u, const MacroField& v, const TestFunction& J) {
  check_same_grid(u, v);
  const int n = u.size(), h = u.half;
  std::vector<cplx> jt(n);
  for (int j = 0; j < n; ++j) jt[j] = J.transform(u.xi(j));
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (u.values[i] == 0.0) continue;
    cplx row = 0.0;
    // -k_i - xi_j sits at index 3h - i - j
    for (int j = 0; j < n; ++j) {
      int q = 3 * h - i - j;
      if (q < 0 || q >= n) continue;
      row += v.values[q] * jt[j];
    }
    acc += u.values[i] * row;
  }
  return acc.real() * u.spacing * u.spacing;
}

double energy_kernel(double k, double xi, double theta) {
  if (k == 0.0 || k + xi == 0.0) return 0.0;
  if (xi == 0.0) return 0.5;
  const double e = theta - 1.0;
  double kp = -k - xi;
  double num = std::pow(std::abs(xi), e) - std::pow(std::abs(k), e) - std::pow(std::abs(kp), e);
  double den = std::pow(std::abs(k) * std::abs(kp), e / 2.0);
  return 0.25 * sgn(k) * sgn(kp) * num / den;
}

double energy_functional(const WaveSolution& wave, const TestFunction& J, double theta) {
  const MacroField& p = wave.p_tilde;
  const MacroField& l = wave.l_tilde;
  check_same_grid(p, l);
  double kinetic = 0.5 * quadratic_pairing(p, p, J);
  if (theta >= 3.0) return kinetic + 0.5 * quadratic_pairing(l, l, J);
  const int n = l.size(), h = l.half;
  std::vector<cplx> jt(n);
  for (int j = 0; j < n; ++j) jt[j] = J.transform(l.xi(j));
  // every |k|, |xi|, |k + xi| is a multiple d of the spacing; tabulate the powers once
  const double e = theta - 1.0;
  std::vector<double> pw(2 * n + 1), half_pw(2 * n + 1);
  for (int d = 0; d <= 2 * n; ++d) {
    pw[d] = std::pow(d * l.spacing, e);
    half_pw[d] = std::sqrt(pw[d]);
  }
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (l.values[i] == 0.0) continue;
    const int ki = i - h;
    cplx row = 0.0;
    for (int j = 0; j < n; ++j) {
      int q = 3 * h - i - j;
      if (q < 0 || q >= n || l.values[q] == 0.0) continue;
      const int xj = j - h, kq = q - h;
      double kern;
      if (ki == 0 || kq == 0) kern = 0.0;
      else if (xj == 0) kern = 0.5;
      else kern = 0.25 * (ki > 0 ? 1.0 : -1.0) * (kq > 0 ? 1.0 : -1.0) *
                  (pw[std::abs(xj)] - pw[std::abs(ki)] - pw[std::abs(kq)]) /
                  (half_pw[std::abs(ki)] * half_pw[std::abs(kq)]);
      row += kern * l.values[q] * jt[j];
    }
    acc += l.values[i] * row;
  }
  return kinetic + acc.real() * l.spacing * l.spacing;
}

GridSamples field_on_grid(const MacroField& f, const std::vector<double>& y) {
  GridSamples out;
  out.values.resize(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) {
    cplx acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += f.values[i] * std::polar(1.0, 2.0 * pi * f.xi(i) * y[a]);
    acc *= f.spacing;
    out.values[a] = acc.real();
    out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
  }
  return out;
}

}  // namespace chainlab
