#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace chainlab {

using cplx = std::complex<double>;
using Profile = std::function<double(double)>;

// N-site ring. Site i carries the label x = i - N/2 so the lattice window is centered;
// frequency index a carries k = (a - N/2)/N, ascending from the Nyquist mode -1/2.
struct LatticeGrid {
  int n_sites = 0;
  std::vector<double> frequencies;

  explicit LatticeGrid(int n);
  int size() const { return n_sites; }
  int zero_index() const { return n_sites / 2; }
  // index of -k_a (the Nyquist index maps to itself)
  int mirror(int a) const { return a == 0 ? 0 : n_sites - a; }
  long site_label(int i) const { return static_cast<long>(i) - n_sites / 2; }
  double k(int a) const { return frequencies[a]; }
};

struct WaveSpectrum {
  LatticeGrid grid;
  std::vector<cplx> values;

  explicit WaveSpectrum(const LatticeGrid& g) : grid(g), values(g.size()) {}
};

// lattice sign: sgn(0) = 0 and the Nyquist mode -1/2 counts as negative
double lattice_sign(double k);
// min((theta-1)/2, 1), the exponent of |2 pi xi| in the limiting wave generator
double wave_exponent(double theta);

WaveSpectrum forward_transform(const std::vector<double>& site_values);
WaveSpectrum forward_transform(const std::vector<cplx>& site_values);
std::vector<cplx> inverse_transform(const WaveSpectrum& spectrum);
// real part of the inverse; the largest discarded imaginary part is written to max_imag
std::vector<double> inverse_real(const WaveSpectrum& spectrum, double* max_imag = nullptr);

cplx hilbert_multiplier(double k);
WaveSpectrum apply_hilbert(const WaveSpectrum& spectrum);

cplx d_theta_multiplier(double xi, double theta);
cplx d3l_multiplier(double xi);
cplx semigroup_multiplier(double xi, double t, int sign, double theta);

std::pair<WaveSpectrum, WaveSpectrum> wave_to_pl(const WaveSpectrum& psi);
WaveSpectrum pl_to_wave(const WaveSpectrum& p_hat, const WaveSpectrum& l_hat);

double spectral_energy(const WaveSpectrum& psi);

namespace detail {
// in-place FFT on data in natural FFTW order (index j <-> k = j/N mod 1); unnormalized
void fft_natural(std::vector<cplx>& data, bool forward);
}  // namespace detail

}  // namespace chainlab
