#pragma once

#include "chainlab/potential.hpp"
#include "chainlab/spectral.hpp"

#include <cstdint>
#include <vector>

namespace chainlab {

// splitmix64 stream: output n is a pure function of (key, n)
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key = 0);
  std::uint64_t next_u64();
  double uniform();  // in (0, 1)
  double normal();
  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SimConfig {
  int n_sites = 1024;
  double theta = 2.5;
  double gamma = 1.0;
  double dt = 0.0;  // 0 selects 0.4 / omega_max
  std::uint64_t seed = 0;
  int periodization_images = 8;

  void validate() const;
};

struct ChainState {
  WaveSpectrum spectrum;
  double time = 0.0;
  CounterRng rng;
};

struct PeriodizedDispersion {
  std::vector<double> omega;  // ascending frequency order
  double omega_max = 0.0;
  double image_bound = 0.0;   // 2 sum_{x > MN - N/2} x^-theta
};

PeriodizedDispersion periodized_dispersion(const LatticeGrid& grid, const PotentialSpec& spec, int images);

struct SiteFields {
  std::vector<double> p, l, r;
};

class Chain {
 public:
  explicit Chain(const SimConfig& config);

  const SimConfig& config() const { return config_; }
  const LatticeGrid& grid() const { return grid_; }
  const PeriodizedDispersion& dispersion() const { return disp_; }
  double dt() const { return dt_; }
  double eps() const { return 1.0 / grid_.size(); }

  // p_x = pbar0(eps x), l_x = lbar0(eps x); replica r draws from seed ^ r
  ChainState init_phononic(const Profile& pbar0, const Profile& lbar0, std::uint64_t replica = 0) const;
  ChainState init_wave(const WaveSpectrum& psi, std::uint64_t replica = 0) const;

  void step_harmonic(ChainState& s, double dt) const;
  void step_noise(ChainState& s, double dt) const;
  void step(ChainState& s, double dt) const;
  // integrates to exactly time + duration with at most dt() per step
  void advance(ChainState& s, double duration) const;

  SiteFields observable_fields(const ChainState& s) const;
  std::vector<double> energy_field(const ChainState& s) const;
  double total_energy(const ChainState& s) const { return spectral_energy(s.spectrum); }
  double total_momentum(const ChainState& s) const;

 private:
  SimConfig config_;
  PotentialSpec spec_;
  LatticeGrid grid_;
  PeriodizedDispersion disp_;
  std::vector<double> alpha_;  // alpha_hat at the lattice frequencies
  double dt_;
};

double empirical_pairing(const std::vector<double>& field, const Profile& J, double eps);

}  // namespace chainlab
