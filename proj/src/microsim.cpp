#include "chainlab/microsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// power sum tail for the image bound; coarse Euler-Maclaurin is plenty here
double image_tail(double theta, double from) {
  return std::pow(from, 1.0 - theta) / (theta - 1.0) + 0.5 * std::pow(from, -theta);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t key) : key_(key), base_(mix64(key ^ 0x6A09E667F3BCC909ULL)) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(base_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(2.0 * pi * u2);
  has_spare_ = true;
  return rad * std::cos(2.0 * pi * u2);
}

void SimConfig::validate() const {
  if (n_sites < 4 || n_sites % 2 != 0) throw std::invalid_argument("n_sites must be even and >= 4");
  if (!(theta > 1.0)) throw DomainError("theta must exceed 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
  if (periodization_images < 1) throw std::invalid_argument("periodization_images must be >= 1");
}

PeriodizedDispersion periodized_dispersion(const LatticeGrid& grid, const PotentialSpec& spec, int images) {
  if (images < 1) throw std::invalid_argument("images must be >= 1");
  Dispersion d(spec.theta);
  PeriodizedDispersion out;
  out.omega.resize(grid.size());
  for (int a = 0; a < grid.size(); ++a) {
    out.omega[a] = d.omega(grid.k(a));
    out.omega_max = std::max(out.omega_max, out.omega[a]);
  }
  double n = grid.size();
  out.image_bound = 2.0 * image_tail(spec.theta, images * n - n / 2 + 1.0);
  return out;
}

Chain::Chain(const SimConfig& config)
    : config_(config), spec_{config.theta}, grid_(config.n_sites), dt_(config.dt) {
  config_.validate();
  disp_ = periodized_dispersion(grid_, spec_, config_.periodization_images);
  alpha_.resize(grid_.size());
  for (int a = 0; a < grid_.size(); ++a) alpha_[a] = disp_.omega[a] * disp_.omega[a];
  const double guard = 0.5 / disp_.omega_max;
  if (dt_ == 0.0) dt_ = 0.4 / disp_.omega_max;
  if (dt_ > guard * (1.0 + 1e-12))
    throw std::invalid_argument("dt exceeds the phase-accuracy guard 0.5/omega_max");
}

ChainState Chain::init_wave(const WaveSpectrum& psi, std::uint64_t replica) const {
  if (psi.grid.size() != grid_.size()) throw std::invalid_argument("spectrum size mismatch");
  return ChainState{psi, 0.0, CounterRng(config_.seed ^ replica)};
}

ChainState Chain::init_phononic(const Profile& pbar0, const Profile& lbar0, std::uint64_t replica) const {
  const int n = grid_.size();
  const double eps = 1.0 / n;
  std::vector<double> p(n), l(n);
  double lsum = 0.0;
  for (int i = 0; i < n; ++i) {
    double y = eps * grid_.site_label(i);
    p[i] = pbar0 ? pbar0(y) : 0.0;
    l[i] = lbar0 ? lbar0(y) : 0.0;
    lsum += l[i];
  }
  if (std::abs(lsum * eps) > 1e-10)
    throw DomainError("init_phononic: sampled tension profile has nonzero mean " + std::to_string(lsum * eps));
  WaveSpectrum p_hat = forward_transform(p);
  WaveSpectrum l_hat = forward_transform(l);
  l_hat.values[grid_.zero_index()] = 0.0;
  return init_wave(pl_to_wave(p_hat, l_hat), replica);
}

void Chain::step_harmonic(ChainState& s, double dt) const {
  if (dt == 0.0) return;
  for (int a = 0; a < grid_.size(); ++a) s.spectrum.values[a] *= std::polar(1.0, -disp_.omega[a] * dt);
}

void Chain::step_noise(ChainState& s, double dt) const {
  if (config_.gamma == 0.0 || dt == 0.0) return;
  const int n = grid_.size();
  const int half = n / 2;
  // p_x is the imaginary part of the inverse transform of psi: omega q contributes a real field
  std::vector<cplx> buf(n);
  for (int a = 0; a < n; ++a) buf[(a + half) % n] = s.spectrum.values[a];
  detail::fft_natural(buf, false);
  std::vector<double> p(n), p0(n);
  for (int j = 0; j < n; ++j) p[j] = buf[j].imag() / n;  // natural site order: j = x mod N
  p0 = p;
  const double sd = std::sqrt(dt);
  const double rate = std::sqrt(3.0 * config_.gamma);
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (int x = 0; x < n; ++x) {
    int xm = (x + n - 1) % n;
    int xp = (x + 1) % n;
    double a = p[xm], b = p[x], c = p[xp];
    double phi = rate * sd * s.rng.normal();
    double cs = std::cos(phi), sn = std::sin(phi);
    double m = (a + b + c) / 3.0;
    double w = sn * inv_sqrt3;
    p[xm] = m + (a - m) * cs - (c - b) * w;
    p[x] = m + (b - m) * cs - (a - c) * w;
    p[xp] = m + (c - m) * cs - (b - a) * w;
  }
  for (int j = 0; j < n; ++j) buf[j] = cplx(0.0, p[j] - p0[j]);
  detail::fft_natural(buf, true);
  for (int a = 0; a < n; ++a) s.spectrum.values[a] += buf[(a + half) % n];
}

void Chain::step(ChainState& s, double dt) const {
  step_harmonic(s, 0.5 * dt);
  step_noise(s, dt);
  step_harmonic(s, 0.5 * dt);
  s.time += dt;
}

void Chain::advance(ChainState& s, double duration) const {
  if (duration <= 0.0) return;
  long steps = static_cast<long>(std::ceil(duration / dt_ - 1e-12));
  if (steps < 1) steps = 1;
  const double h = duration / steps;
  const double t0 = s.time;
  if (config_.gamma == 0.0) {
    step_harmonic(s, duration);
  } else {
    for (long i = 0; i < steps; ++i) step(s, h);
  }
  s.time = t0 + duration;
}

double Chain::total_momentum(const ChainState& s) const {
  // sum_x p_x = p_hat(0) = Im psi_hat(0)
  return s.spectrum.values[grid_.zero_index()].imag();
}

SiteFields Chain::observable_fields(const ChainState& s) const {
  auto [p_hat, l_hat] = wave_to_pl(s.spectrum);
  WaveSpectrum r_hat(grid_);
  for (int a = 0; a < grid_.size(); ++a) {
    double k = grid_.k(a);
    double sg = lattice_sign(k);
    if (a == 0 || sg == 0.0) continue;
    cplx num = 1.0 - std::polar(1.0, -2.0 * pi * k);
    r_hat.values[a] = num / cplx(0.0, sg * disp_.omega[a]) * l_hat.values[a];
  }
  SiteFields f;
  f.p = inverse_real(p_hat);
  f.l = inverse_real(l_hat);
  f.r = inverse_real(r_hat);
  return f;
}

std::vector<double> Chain::energy_field(const ChainState& s) const {
  const int n = grid_.size();
  WaveSpectrum q_hat(grid_);
  for (int a = 0; a < n; ++a) {
    if (a == grid_.zero_index()) continue;
    cplx sum = s.spectrum.values[a] + std::conj(s.spectrum.values[grid_.mirror(a)]);
    q_hat.values[a] = sum / (2.0 * disp_.omega[a]);
  }
  auto [p_hat, l_hat] = wave_to_pl(s.spectrum);
  std::vector<double> p = inverse_real(p_hat);
  std::vector<double> q = inverse_real(q_hat);
  std::vector<double> q2(n);
  for (int i = 0; i < n; ++i) q2[i] = q[i] * q[i];
  WaveSpectrum aq = q_hat;
  for (int a = 0; a < n; ++a) aq.values[a] *= alpha_[a];
  WaveSpectrum aq2 = forward_transform(q2);
  for (int a = 0; a < n; ++a) aq2.values[a] *= alpha_[a];
  std::vector<double> conv_q = inverse_real(aq);
  std::vector<double> conv_q2 = inverse_real(aq2);
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i)
    e[i] = 0.5 * p[i] * p[i] - 0.25 * (conv_q2[i] - 2.0 * q[i] * conv_q[i]);
  return e;
}

double empirical_pairing(const std::vector<double>& field, const Profile& J, double eps) {
  const int n = static_cast<int>(field.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += field[i] * J(eps * (i - n / 2));
  return eps * acc;
}

}  // namespace chainlab
