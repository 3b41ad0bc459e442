#include "chainlab/spectral.hpp"

#include "chainlab/potential.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// the FFTW planner is not thread-safe; execution with new arrays is
const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair p;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

void check_even(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("lattice size must be even and >= 2");
}

}  // namespace

namespace detail {
void fft_natural(std::vector<cplx>& data, bool forward) {
  const PlanPair& p = plans_for(static_cast<int>(data.size()));
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward ? p.forward : p.backward, buf, buf);
}
}  // namespace detail

LatticeGrid::LatticeGrid(int n) : n_sites(n) {
  check_even(static_cast<std::size_t>(n));
  frequencies.resize(n);
  for (int a = 0; a < n; ++a) frequencies[a] = static_cast<double>(a - n / 2) / n;
}

double lattice_sign(double k) {
  if (k == 0.0) return 0.0;
  return k > 0.0 && k < 0.5 ? 1.0 : -1.0;
}

double wave_exponent(double theta) { return std::min((theta - 1.0) / 2.0, 1.0); }

WaveSpectrum forward_transform(const std::vector<cplx>& site_values) {
  const std::size_t n = site_values.size();
  check_even(n);
  const std::size_t half = n / 2;
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[(i + half) % n] = site_values[i];
  detail::fft_natural(buf, true);
  WaveSpectrum out{LatticeGrid(static_cast<int>(n))};
  for (std::size_t a = 0; a < n; ++a) out.values[a] = buf[(a + half) % n];
  return out;
}

WaveSpectrum forward_transform(const std::vector<double>& site_values) {
  std::vector<cplx> c(site_values.begin(), site_values.end());
  return forward_transform(c);
}

std::vector<cplx> inverse_transform(const WaveSpectrum& spectrum) {
  const std::size_t n = spectrum.values.size();
  if (n != static_cast<std::size_t>(spectrum.grid.size()))
    throw std::invalid_argument("spectrum length does not match its grid");
  const std::size_t half = n / 2;
  std::vector<cplx> buf(n);
  for (std::size_t a = 0; a < n; ++a) buf[(a + half) % n] = spectrum.values[a];
  detail::fft_natural(buf, false);
  std::vector<cplx> out(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[(i + half) % n] * inv;
  return out;
}

std::vector<double> inverse_real(const WaveSpectrum& spectrum, double* max_imag) {
  auto c = inverse_transform(spectrum);
  std::vector<double> out(c.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = c[i].real();
    worst = std::max(worst, std::abs(c[i].imag()));
  }
  if (max_imag) *max_imag = worst;
  return out;
}

cplx hilbert_multiplier(double k) { return cplx(0.0, -lattice_sign(reduce_frequency(k))); }

WaveSpectrum apply_hilbert(const WaveSpectrum& spectrum) {
  WaveSpectrum out = spectrum;
  for (int a = 0; a < spectrum.grid.size(); ++a)
    out.values[a] = a == 0 ? cplx(0.0) : hilbert_multiplier(spectrum.grid.k(a)) * spectrum.values[a];
  return out;
}

cplx d_theta_multiplier(double xi, double theta) {
  if (xi == 0.0) return 0.0;
  if (theta > 3.0) return cplx(0.0, 2.0 * pi * xi);
  double s = xi > 0.0 ? 1.0 : -1.0;
  return cplx(0.0, s * std::pow(2.0 * pi * std::abs(xi), (theta - 1.0) / 2.0));
}

cplx d3l_multiplier(double xi) {
  if (xi == 0.0) return 0.0;
  double s = xi > 0.0 ? 1.0 : -1.0;
  double a = 2.0 * pi * std::abs(xi);
  return cplx(0.0, s * a * std::log(1.0 / a));
}

cplx semigroup_multiplier(double xi, double t, int sign, double theta) {
  if (xi == 0.0) return 1.0;
  double s = xi > 0.0 ? 1.0 : -1.0;
  double phase = std::sqrt(const_c1(theta)) * s *
                 std::pow(2.0 * pi * std::abs(xi), wave_exponent(theta)) * t;
  if (sign < 0) phase = -phase;
  return std::polar(1.0, phase);
}

std::pair<WaveSpectrum, WaveSpectrum> wave_to_pl(const WaveSpectrum& psi) {
  const LatticeGrid& g = psi.grid;
  WaveSpectrum p(g), l(g);
  for (int a = 0; a < g.size(); ++a) {
    cplx here = psi.values[a];
    cplx there = std::conj(psi.values[g.mirror(a)]);
    p.values[a] = (here - there) / cplx(0.0, 2.0);
    // the Nyquist tension mode has no real representative
    if (a != 0) l.values[a] = cplx(0.0, 0.5 * lattice_sign(g.k(a))) * (here + there);
  }
  return {std::move(p), std::move(l)};
}

WaveSpectrum pl_to_wave(const WaveSpectrum& p_hat, const WaveSpectrum& l_hat) {
  const LatticeGrid& g = p_hat.grid;
  if (l_hat.grid.size() != g.size()) throw std::invalid_argument("p and l spectra differ in size");
  double scale = 1.0;
  for (const auto& v : l_hat.values) scale = std::max(scale, std::abs(v));
  if (std::abs(l_hat.values[g.zero_index()]) > 1e-10 * scale)
    throw DomainError("pl_to_wave: the k=0 tension mode must vanish");
  WaveSpectrum psi(g);
  for (int a = 0; a < g.size(); ++a) {
    double s = lattice_sign(g.k(a));
    cplx l = a == 0 ? cplx(0.0) : l_hat.values[a];
    psi.values[a] = cplx(0.0, 1.0) * p_hat.values[a] - cplx(0.0, s) * l;
  }
  return psi;
}

double spectral_energy(const WaveSpectrum& psi) {
  double acc = 0.0;
  for (const auto& v : psi.values) acc += std::norm(v);
  return acc / psi.grid.size();
}

}  // namespace chainlab
