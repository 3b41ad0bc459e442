#pragma once

#include "chainlab/spectral.hpp"

#include <array>
#include <functional>
#include <vector>

namespace chainlab {

// Time and remainder scalings of the mean and fluctuation limits as functions of eps.
struct ScalingSchedule {
  double theta = 2.5;

  double j(double eps) const;  // mean dynamics time scale, theta > 1
  double m(double eps) const;  // macroscopic recentering scale, theta > 2
  double n(double eps) const;  // fluctuation time scale, theta > 2
  double b(double eps) const;  // rate of A_eps -> A_limit, theta > 1
  double r(double eps) const;  // rate of M_eps -> M_limit, theta > 2
};

ScalingSchedule schedule(double theta);

// Exponent of the b / r envelopes with a log flag:
// log_power = +1 means eps^e log(1/eps), -1 means (log 1/eps)^-1 (with e = 0).
struct RateLaw {
  double exponent = 0.0;
  int log_power = 0;
};
RateLaw b_rate(double theta);
RateLaw r_rate(double theta);

struct ModeMatrix {
  std::array<cplx, 4> e{};  // row-major (11, 12, 21, 22)

  cplx& operator()(int i, int j) { return e[2 * i + j]; }
  const cplx& operator()(int i, int j) const { return e[2 * i + j]; }

  static ModeMatrix identity();
  ModeMatrix operator+(const ModeMatrix& o) const;
  ModeMatrix operator-(const ModeMatrix& o) const;
  ModeMatrix operator*(const ModeMatrix& o) const;
  ModeMatrix operator*(cplx s) const;
  cplx trace() const { return e[0] + e[3]; }
  cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
  std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const;
};

std::array<cplx, 2> eigenvalues(const ModeMatrix& a);

// Mean generator in microscopic-to-macroscopic units:
// (1/j) [[-2 gamma R(eps k), i sgn omega(eps k)], [i sgn omega(eps k), 0]]
ModeMatrix a_eps(double k, double eps, double theta, double gamma);
ModeMatrix a_limit(double k, double theta);
ModeMatrix b_rem(double k, double eps, double theta, double gamma);

// Recentered fluctuation generator acting on (F+, F-)
ModeMatrix m_eps(double k, double eps, double theta, double gamma);
ModeMatrix m_limit(double xi, double theta, double gamma);
ModeMatrix rem(double k, double eps, double theta, double gamma);
// the limit generator with the coefficients exactly as printed in the source tables;
// kept for comparison only (it is not the limit of m_eps, see README)
ModeMatrix m_limit_printed(double xi, double theta, double gamma);

ModeMatrix expm2(const ModeMatrix& a, double t);
// scaled-and-squared Taylor exponential; the fallback path of expm2 and an oracle for tests
ModeMatrix expm_taylor(const ModeMatrix& a, double t);
double opnorm2(const ModeMatrix& a);

using Generator = std::function<ModeMatrix(double)>;

// applies exp(G(xi) t) mode by mode to the pair (u, v) sampled on xi
void evolve_modes(const std::vector<double>& xi, std::vector<cplx>& u, std::vector<cplx>& v,
                  const Generator& gen, double t);

}  // namespace chainlab
