#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chainlab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// raised when a requested accuracy cannot be met (maps to CLI exit status 3)
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PotentialSpec {
  double theta = 2.5;
  long series_cutoff = 100000;
  double tail_tolerance = 1e-10;

  void validate() const;
};

struct AsymptoticConstants {
  double c1 = 0.0;
  double c2 = 0.0;  // NaN when theta <= 2 (no second-order term in the table)
  double leading_exponent = 0.0;
  double second_exponent = 0.0;
  bool has_log_leading = false;
  bool has_log_second = false;
};

struct Prediction {
  double predicted = 0.0;
  double remainder_exponent = 0.0;
  bool remainder_has_log = false;
};

struct CrossCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double remainder_bound = 0.0;
};

struct SeriesEstimate {
  double value = 0.0;
  double error_bound = 0.0;
};

// reduce k modulo 1 into [-1/2, 1/2)
double reduce_frequency(double k);

bool is_integer_theta(double theta);

// Riemann zeta for s > 1 by partial sum plus Euler-Maclaurin tail
double zeta_series(double s);

double alpha_coeff(long x, const PotentialSpec& spec);

// Exact evaluator of 2 sum_{x>=1} (1 - cos 2 pi k x) / x^theta.
// Uses the small-frequency expansion of the periodic zeta function, which converges
// geometrically on the whole torus; coefficients are cached per theta.
class Dispersion {
 public:
  explicit Dispersion(double theta);
  double theta() const { return theta_; }
  double alpha_hat(double k) const;
  double omega(double k) const;

 private:
  double theta_;
  bool integer_;
  int n_ = 0;
  double lead_ = 0.0;                 // coefficient of mu^(theta-1) (non-integer theta)
  std::vector<double> even_;          // coefficient of mu^(2m), index m
  double log_coef_ = 0.0;             // integer odd theta: mu^(n-1) log(1/mu)
  double odd_coef_ = 0.0;             // integer theta: extra mu^(n-1) coefficient
};

double alpha_hat(double k, const PotentialSpec& spec);
// the truncated lattice sum with tail corrections; throws NonConvergence if the
// error bound exceeds spec.tail_tolerance
SeriesEstimate alpha_hat_series(double k, const PotentialSpec& spec);
double omega(double k, const PotentialSpec& spec);

double noise_rate_R(double k);
double noise_kernel_r(double k, double kprime);
double coupling_F(double k, double kprime, const PotentialSpec& spec);

double const_c1(double theta);
double const_c2(double theta);
AsymptoticConstants asymptotic_constants(double theta);

Prediction asymptotic_prediction(double k, const PotentialSpec& spec);
CrossCheck cross_asymptotic_check(double k, double kprime, const PotentialSpec& spec);

// envelope |k|^e (times log|k|^-1 when flagged) used to scale remainders
double remainder_envelope(double k, double exponent, bool with_log);

}  // namespace chainlab
