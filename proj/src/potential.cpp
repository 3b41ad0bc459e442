#include "chainlab/potential.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kExpansionTerms = 40;

// Bernoulli numbers B_2 .. B_12
constexpr double kBernoulli[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730};

// sum_{n >= N} n^{-s} via Euler-Maclaurin, s > 1
double tail_power_sum(double s, double N) {
  double acc = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  double rising = s;  // s (s+1) ... (s+2j-2)
  double fact = 2.0;  // (2j)!
  for (int j = 1; j <= 6; ++j) {
    acc += kBernoulli[j - 1] / fact * rising * std::pow(N, -s - 2.0 * j + 1.0);
    rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  return acc;
}

// int_A^inf cos(y) y^-a dy, two integrations by parts then panel Gauss on the rest
double cos_tail(double a, double A) {
  using boost::math::quadrature::gauss;
  const double b = a + 2.0;
  const double panel = pi / 2;
  const int panels = 1600;
  double rest = 0.0;
  for (int i = 0; i < panels; ++i) {
    double lo = A + i * panel;
    rest += gauss<double, 30>::integrate([b](double y) { return std::cos(y) * std::pow(y, -b); }, lo,
                                         lo + panel);
  }
  const double Y = A + panels * panel;
  rest += -std::sin(Y) * std::pow(Y, -b) + b * std::cos(Y) * std::pow(Y, -b - 1.0) +
          b * (b + 1.0) * std::sin(Y) * std::pow(Y, -b - 2.0);
  return -std::sin(A) * std::pow(A, -a) + a * std::cos(A) * std::pow(A, -a - 1.0) -
         a * (a + 1.0) * rest;
}

// int_0^1 (2 - 2cos y - [m0 == 1] y^2) / y^theta dy from the Taylor series of the numerator
double near_origin(double theta, int m0) {
  double acc = 0.0;
  double fact = 2.0;  // (2m+2)!
  for (int m = 0; m < 30; ++m) {
    if (m > 0) fact *= (2.0 * m + 1.0) * (2.0 * m + 2.0);
    if (m < m0) continue;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    acc += 2.0 * sign / (fact * (3.0 - theta + 2.0 * m));
  }
  return acc;
}

double harmonic(int n) {
  double h = 0.0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

// int_1^inf ([y]^-a - y^-a) dy for 0 < a < 1, per unit interval, Euler-Maclaurin after nterms
double staircase(double a) {
  const long nterms = 100000;
  double acc = 0.0;
  for (long n = nterms; n >= 1; --n) {
    double x = 1.0 / n;
    double unit = std::pow(n, 1.0 - a) * std::expm1((1.0 - a) * std::log1p(x)) / (1.0 - a);
    acc += std::pow(n, -a) - unit;
  }
  // g(n) = sum_j (-1)^(j+1) a(a+1)..(a+j-1)/(j+1)! n^(-a-j)
  double tail = 0.0;
  double poch = 1.0;
  double fact = 1.0;
  for (int j = 1; j <= 6; ++j) {
    poch *= a + j - 1.0;
    fact *= j + 1.0;
    double sign = (j % 2 == 1) ? 1.0 : -1.0;
    tail += sign * poch / fact * tail_power_sum(a + j, nterms + 1.0);
  }
  return acc + tail;
}

}  // namespace

void PotentialSpec::validate() const {
  if (!(theta > 1.0)) throw DomainError("theta must exceed 1, got " + std::to_string(theta));
  if (!(tail_tolerance > 0.0)) throw DomainError("tail_tolerance must be positive");
  if (series_cutoff < 1000) throw DomainError("series_cutoff must be at least 1000");
}

double reduce_frequency(double k) {
  double r = k - std::floor(k + 0.5);
  if (r >= 0.5) r -= 1.0;
  return r;
}

bool is_integer_theta(double theta) { return theta == std::floor(theta); }

double zeta_series(double s) {
  if (!(s > 1.0)) throw DomainError("zeta_series needs s > 1");
  const int N = 64;
  double acc = 0.0;
  for (int n = N - 1; n >= 1; --n) acc += std::pow(n, -s);
  return acc + tail_power_sum(s, N);
}

double alpha_coeff(long x, const PotentialSpec& spec) {
  spec.validate();
  if (x != 0) return -std::pow(std::abs(static_cast<double>(x)), -spec.theta);
  return 2.0 * zeta_series(spec.theta);
}

Dispersion::Dispersion(double theta) : theta_(theta), integer_(is_integer_theta(theta)) {
  if (!(theta > 1.0)) throw DomainError("theta must exceed 1");
  even_.assign(kExpansionTerms + 1, 0.0);
  double fact = 1.0;
  if (!integer_) {
    lead_ = -2.0 * boost::math::tgamma(1.0 - theta) * std::cos(pi * (theta - 1.0) / 2.0);
    for (int m = 1; m <= kExpansionTerms; ++m) {
      fact *= (2.0 * m - 1.0) * (2.0 * m);
      double sign = (m % 2 == 0) ? 1.0 : -1.0;
      even_[m] = -2.0 * sign * boost::math::zeta(theta - 2.0 * m) / fact;
    }
    return;
  }
  n_ = static_cast<int>(theta);
  for (int m = 1; m <= kExpansionTerms; ++m) {
    fact *= (2.0 * m - 1.0) * (2.0 * m);
    if (2 * m == n_ - 1) continue;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    even_[m] = -2.0 * sign * boost::math::zeta(static_cast<double>(n_ - 2 * m)) / fact;
  }
  double fact_n1 = boost::math::factorial<double>(n_ - 1);
  if (n_ % 2 == 1) {
    double sign = (((n_ - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    log_coef_ = -2.0 * sign / fact_n1;
    odd_coef_ = -2.0 * sign * harmonic(n_ - 1) / fact_n1;
  } else {
    double sign = (((n_ - 2) / 2) % 2 == 0) ? 1.0 : -1.0;
    odd_coef_ = sign * pi / fact_n1;
  }
}

double Dispersion::alpha_hat(double k) const {
  double mu = 2.0 * pi * std::abs(reduce_frequency(k));
  if (mu == 0.0) return 0.0;
  double mu2 = mu * mu;
  double poly = 0.0;
  for (int m = kExpansionTerms; m >= 1; --m) poly = (poly + even_[m]) * mu2;
  double singular;
  if (!integer_) {
    singular = lead_ * std::pow(mu, theta_ - 1.0);
  } else {
    double p = std::pow(mu, n_ - 1);
    singular = odd_coef_ * p + log_coef_ * p * std::log(1.0 / mu);
  }
  return std::max(0.0, poly + singular);
}

double Dispersion::omega(double k) const { return std::sqrt(alpha_hat(k)); }

namespace {
const Dispersion& cached_dispersion(double theta) {
  thread_local std::optional<Dispersion> cache;
  if (!cache || cache->theta() != theta) cache.emplace(theta);
  return *cache;
}
}  // namespace

double alpha_hat(double k, const PotentialSpec& spec) {
  spec.validate();
  return cached_dispersion(spec.theta).alpha_hat(k);
}

double omega(double k, const PotentialSpec& spec) { return std::sqrt(alpha_hat(k, spec)); }

SeriesEstimate alpha_hat_series(double k, const PotentialSpec& spec) {
  spec.validate();
  const double theta = spec.theta;
  const double mu = 2.0 * pi * std::abs(reduce_frequency(k));
  if (mu == 0.0) return {0.0, 0.0};
  const long X = spec.series_cutoff;
  double head = 0.0;
  for (long x = X; x >= 1; --x) {
    double c = std::cos(mu * static_cast<double>(x));
    head += (1.0 - c) * std::pow(static_cast<double>(x), -theta);
  }
  const double next = X + 1.0;
  double flat_tail = tail_power_sum(theta, next);
  double s = std::sin(mu / 2.0);
  double cos_tail_est = -std::pow(next, -theta) * std::sin(mu * (X + 0.5)) / (2.0 * s);
  double bound = 2.0 * (theta * std::pow(next, -theta - 1.0) / (2.0 * s * s) +
                        std::pow(next, -theta - 13.0));
  SeriesEstimate out{2.0 * (head + flat_tail - cos_tail_est), bound};
  if (bound > spec.tail_tolerance) {
    throw NonConvergence("alpha_hat series at k=" + std::to_string(k) +
                         " cannot reach tolerance with cutoff " + std::to_string(X) +
                         " (bound " + std::to_string(bound) + ")");
  }
  return out;
}

double noise_rate_R(double k) {
  double s1 = std::sin(pi * k);
  double s2 = std::sin(2.0 * pi * k);
  return 2.0 * s1 * s1 * s1 * s1 + 1.5 * s2 * s2;
}

double noise_kernel_r(double k, double kprime) {
  double s1 = std::sin(pi * k);
  double sd = std::sin(pi * (k - kprime));
  return 2.0 * s1 * s1 * std::sin(2.0 * pi * (k - kprime)) + 2.0 * std::sin(2.0 * pi * k) * sd * sd;
}

double coupling_F(double k, double kprime, const PotentialSpec& spec) {
  spec.validate();
  double a = reduce_frequency(k);
  double b = reduce_frequency(kprime);
  if (a == 0.0 || b == 0.0) throw DomainError("coupling_F undefined at zero frequency");
  const Dispersion& d = cached_dispersion(spec.theta);
  return (d.alpha_hat(a + b) - d.alpha_hat(a) - d.alpha_hat(b)) / (d.omega(a) * d.omega(b));
}

namespace {
template <class F>
double memoized(std::map<double, double>& cache, double theta, F&& compute) {
  auto it = cache.find(theta);
  if (it != cache.end()) return it->second;
  double v = compute(theta);
  cache.emplace(theta, v);
  return v;
}

double compute_c1(double theta) {
  if (theta == 3.0) return 1.0;
  if (theta > 3.0) return zeta_series(theta - 2.0);
  return near_origin(theta, 0) + 2.0 / (theta - 1.0) - 2.0 * cos_tail(theta, 1.0);
}

double compute_c2(double theta) {
  if (theta < 3.0) return -1.0 / (3.0 - theta) + staircase(theta - 2.0);
  if (theta == 3.0) return 1.5;
  if (theta < 5.0) {
    return near_origin(theta, 1) + 2.0 / (theta - 1.0) - 1.0 / (theta - 3.0) -
           2.0 * cos_tail(theta, 1.0);
  }
  if (theta == 5.0) return -1.0 / 12.0;
  return -zeta_series(theta - 4.0) / 12.0;
}
}  // namespace

double const_c1(double theta) {
  if (!(theta > 1.0)) throw DomainError("const_c1 needs theta > 1");
  thread_local std::map<double, double> cache;
  return memoized(cache, theta, compute_c1);
}

double const_c2(double theta) {
  if (!(theta > 2.0)) throw DomainError("const_c2 needs theta > 2");
  thread_local std::map<double, double> cache;
  return memoized(cache, theta, compute_c2);
}

AsymptoticConstants asymptotic_constants(double theta) {
  AsymptoticConstants c;
  c.c1 = const_c1(theta);
  c.c2 = theta > 2.0 ? const_c2(theta) : std::numeric_limits<double>::quiet_NaN();
  c.leading_exponent = std::min(theta - 1.0, 2.0);
  if (theta <= 2.0)
    c.second_exponent = std::numeric_limits<double>::quiet_NaN();
  else if (theta <= 3.0)
    c.second_exponent = 2.0;
  else if (theta < 5.0)
    c.second_exponent = theta - 1.0;
  else
    c.second_exponent = 4.0;
  c.has_log_leading = theta == 3.0;
  c.has_log_second = theta == 5.0;
  return c;
}

Prediction asymptotic_prediction(double k, const PotentialSpec& spec) {
  spec.validate();
  const double theta = spec.theta;
  const double ak = std::abs(reduce_frequency(k));
  if (ak == 0.0) throw DomainError("asymptotic_prediction needs k != 0");
  const double mu = 2.0 * pi * ak;
  const double c1 = const_c1(theta);
  Prediction p;
  if (theta < 2.0) {
    p = {c1 * std::pow(mu, theta - 1.0), theta, false};
  } else if (theta == 2.0) {
    p = {c1 * mu, 2.0, true};
  } else if (theta < 3.0) {
    p = {c1 * std::pow(mu, theta - 1.0) + const_c2(theta) * mu * mu, theta, false};
  } else if (theta == 3.0) {
    p = {c1 * mu * mu * std::log(1.0 / mu) + const_c2(theta) * mu * mu, 3.0, false};
  } else if (theta < 5.0) {
    double pred = c1 * mu * mu + const_c2(theta) * std::pow(mu, theta - 1.0);
    if (theta < 4.0)
      p = {pred, theta, false};
    else if (theta == 4.0)
      p = {pred, 4.0, true};
    else
      p = {pred, 4.0, false};
  } else if (theta == 5.0) {
    p = {c1 * mu * mu + const_c2(theta) * std::pow(mu, 4) * std::log(1.0 / ak), 4.0, false};
  } else {
    double pred = c1 * mu * mu + const_c2(theta) * std::pow(mu, 4);
    if (theta < 7.0)
      p = {pred, theta - 1.0, false};
    else if (theta == 7.0)
      p = {pred, 6.0, true};
    else
      p = {pred, 6.0, false};
  }
  return p;
}

double remainder_envelope(double k, double exponent, bool with_log) {
  double ak = std::abs(k);
  double env = std::pow(ak, exponent);
  return with_log ? env * std::log(1.0 / ak) : env;
}

CrossCheck cross_asymptotic_check(double k, double kprime, const PotentialSpec& spec) {
  spec.validate();
  const double s = k + kprime;
  auto inside = [](double v) { return v != 0.0 && std::abs(v) < 0.5; };
  if (!inside(k) || !inside(kprime) || !inside(s))
    throw DomainError("cross_asymptotic_check needs k, k', k+k' nonzero inside (-1/2, 1/2)");
  const double theta = spec.theta;
  const Dispersion& d = cached_dispersion(theta);
  CrossCheck c;
  c.lhs = d.alpha_hat(s) - d.alpha_hat(k) - d.alpha_hat(kprime);
  const double ak = std::abs(k), bk = std::abs(kprime), sk = std::abs(s);
  const double twopi = 2.0 * pi;
  if (theta < 3.0) {
    double e = theta - 1.0;
    c.rhs = std::pow(twopi, e) * const_c1(theta) *
            (std::pow(sk, e) - std::pow(ak, e) - std::pow(bk, e));
    if (theta < 2.0)
      c.remainder_bound = std::pow(ak, e) * bk + ak * std::pow(bk, e);
    else if (theta == 2.0)
      c.remainder_bound = ak * bk * (std::log(1.0 / ak) + std::log(1.0 / bk));
    else
      c.remainder_bound = ak * bk;
  } else if (theta == 3.0) {
    auto f = [](double v) { return v * v * std::log(1.0 / v); };
    c.rhs = twopi * twopi * (f(sk) - f(ak) - f(bk));
    c.remainder_bound = ak * bk;
  } else {
    c.rhs = 2.0 * twopi * twopi * const_c1(theta) * k * kprime;
    c.remainder_bound = ak * bk * std::pow(ak + bk, std::min(theta - 3.0, 2.0));
  }
  return c;
}

}  // namespace chainlab
