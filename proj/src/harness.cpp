#include "chainlab/harness.hpp"

#include "chainlab/potential.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace chainlab {

namespace {

constexpr double pi = std::numbers::pi;

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double bump_slope(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double d = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (d * d));
}

// int_{-1}^{1} bump(s) cos(a s) ds by composite Gauss-Legendre
double bump_cosine_integral(double a) {
  using boost::math::quadrature::gauss;
  const int panels = 8 + static_cast<int>(std::ceil(std::abs(a) / (2.0 * pi)));
  const double h = 2.0 / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = -1.0 + p * h;
    double mid = lo + 0.5 * h;
    acc += 0.5 * h * gauss<double, 30>::integrate([&](double u) {
      double s = mid + 0.5 * h * u;
      return bump(s) * std::cos(a * s);
    }, -1.0, 1.0);
  }
  return acc;
}

// transform of y -> bump((y - c)/w), memoized per frequency
Transform bump_transform(double center, double width) {
  auto cache = std::make_shared<std::map<double, double>>();
  auto mutex = std::make_shared<std::mutex>();
  return [=](double xi) -> cplx {
    double base;
    {
      std::lock_guard<std::mutex> lock(*mutex);
      auto it = cache->find(xi);
      if (it != cache->end()) {
        base = it->second;
      } else {
        base = width * bump_cosine_integral(2.0 * pi * xi * width);
        cache->emplace(xi, base);
      }
    }
    return base * std::polar(1.0, -2.0 * pi * xi * center);
  };
}

ConvergenceReport new_report(const std::string& name, double theta, double gamma, const std::vector<int>& grid,
                             std::uint64_t seed) {
  ConvergenceReport rep;
  rep.experiment = name;
  rep.theta = theta;
  rep.gamma = gamma;
  rep.grid = grid;
  rep.seed = seed;
  return rep;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// sum |a - b|^2 over the window, both on the integer grid
double l2_gap(const MacroField& a, const MacroField& b) {
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
  return acc * a.spacing;
}

double l2_norm2(const MacroField& a) {
  double acc = 0.0;
  for (const auto& v : a.values) acc += std::norm(v);
  return acc * a.spacing;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

double eps_of(int n_sites) { return 1.0 / n_sites; }

std::vector<double> default_times(const ExperimentConfig& c) {
  if (!c.times.empty()) return c.times;
  if (c.experiment == "fluc") return {0.0, 0.05};
  if (c.experiment == "lln") return {0.05};
  // light cone at 0.2 of the unit window
  return {0.0, 0.2 / std::sqrt(const_c1(c.theta))};
}

// ring spectra -> eps-scaled integer-grid fields
SampledData scaled_pl(const WaveSpectrum& psi) {
  auto [p, l] = wave_to_pl(psi);
  const int n = psi.grid.size();
  const double eps = eps_of(n);
  SampledData out{MacroField(n / 2, 1.0), MacroField(n / 2, 1.0)};
  for (int a = 0; a < n; ++a) {
    out.p.values[a] = eps * p.values[a];
    out.l.values[a] = eps * l.values[a];
  }
  return out;
}

struct RunningMean {
  std::vector<cplx> sum;
  std::vector<double> sum_sq;  // |.|^2
  int count = 0;

  explicit RunningMean(int n = 0) : sum(n), sum_sq(n) {}
  void add(const std::vector<cplx>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum[i] += v[i];
      sum_sq[i] += std::norm(v[i]);
    }
    ++count;
  }
  std::vector<cplx> mean() const {
    std::vector<cplx> m(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) m[i] = sum[i] / static_cast<double>(count);
    return m;
  }
  // squared standard error of the mean summed over entries
  double se2_total() const {
    if (count < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      double m2 = std::norm(sum[i] / static_cast<double>(count));
      double var = (sum_sq[i] / count - m2) * count / (count - 1.0);
      acc += std::max(var, 0.0) / count;
    }
    return acc;
  }
};

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

double std_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1.0) / v.size());
}

void add_profiles(ConvergenceReport& rep, const WaveSolution& w, int n_sites, double theta) {
  auto y = linspace(-0.5, 0.5, 201);
  y.pop_back();
  auto p = field_on_grid(w.p_tilde, y);
  auto l = field_on_grid(w.l_tilde, y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    double e = theta >= 3.0 ? 0.5 * (p.values[i] * p.values[i] + l.values[i] * l.values[i])
                            : std::numeric_limits<double>::quiet_NaN();
    rep.profiles.push_back({theta, n_sites, w.time, y[i], p.values[i], l.values[i], e});
  }
}

// ratio of every non-growing check: the largest value seen after the first is at most
// `factor` times the first
bool non_growing(const std::vector<double>& ratios, double factor) {
  if (ratios.empty()) return true;
  double first = ratios.front();
  for (double r : ratios)
    if (!(r <= factor * first)) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- profiles

InitialProfiles make_initial_profiles(const std::string& kind, const ProfileParams& params) {
  const double w = params.width, c = params.center, ap = params.p_amplitude, al = params.l_amplitude;
  if (!(w > 0.0)) throw std::invalid_argument("profile width must be positive");
  InitialProfiles out;
  out.kind = kind;
  if (kind == "gaussian_pair" || kind == "momentum_only") {
    // e^{-((y-c)/s)^2} with s = w/3 keeps the profile below 1.3e-4 outside the support radius w
    const double s = w / 3.0;
    auto g = [=](double y) { double u = (y - c) / s; return std::exp(-u * u); };
    Transform gt = [=](double xi) {
      return s * std::sqrt(pi) * std::exp(-pi * pi * s * s * xi * xi) * std::polar(1.0, -2.0 * pi * xi * c);
    };
    out.p0 = [=](double y) { return ap * g(y); };
    out.p0_t = [=](double xi) { return ap * gt(xi); };
    if (kind == "momentum_only") {
      out.l0 = [](double) { return 0.0; };
      out.l0_t = [](double) { return cplx(0.0); };
    } else {
      // s d/dy of the gaussian: exactly zero mean
      out.l0 = [=](double y) { double u = (y - c) / s; return al * (-2.0 * u) * std::exp(-u * u); };
      out.l0_t = [=](double xi) { return al * s * cplx(0.0, 2.0 * pi * xi) * gt(xi); };
    }
    return out;
  }
  if (kind == "bump_pair") {
    Transform bt = bump_transform(c, w);
    out.p0 = [=](double y) { return ap * bump((y - c) / w); };
    out.p0_t = [=](double xi) { return ap * bt(xi); };
    out.l0 = [=](double y) { return al * bump_slope((y - c) / w); };
    out.l0_t = [=](double xi) { return al * w * cplx(0.0, 2.0 * pi * xi) * bt(xi); };
    return out;
  }
  throw std::invalid_argument("unknown profile kind '" + kind + "'");
}

TestFunction bump_test_function(double center, double width) {
  TestFunction t;
  t.name = "bump(" + fmt(center) + "," + fmt(width) + ")";
  t.value = [=](double y) { return bump((y - center) / width); };
  t.transform = bump_transform(center, width);
  return t;
}

std::vector<TestFunction> default_test_functions() {
  return {bump_test_function(-0.15, 0.2), bump_test_function(0.0, 0.3), bump_test_function(0.1, 0.15)};
}

// ---------------------------------------------------------------- bookkeeping

void ExperimentConfig::validate() const {
  static const char* kinds[] = {"mean", "micro", "energy", "fluc", "lln", "bounds"};
  if (std::find(std::begin(kinds), std::end(kinds), experiment) == std::end(kinds))
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  if (!(theta > 1.0)) throw DomainError("theta must exceed 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  if (sites.empty()) throw std::invalid_argument("sites must not be empty");
  for (int n : sites)
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("every lattice size must be even and >= 4");
  for (double t : times)
    if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");
  if (std::abs(profile_params.center) + profile_params.width > 0.2 + 1e-12)
    throw std::invalid_argument("initial profiles must be supported inside [-0.2, 0.2]");
  if ((experiment == "fluc" || experiment == "lln") && !(theta > 2.0))
    throw DomainError("fluctuation experiments need theta > 2");
  if (experiment == "lln" && !(theta < 4.0)) throw DomainError("the law of large numbers run needs 2 < theta < 4");
  if (experiment == "fluc" && theta >= 4.0 && !(gamma > 0.0))
    throw DomainError("fluctuations at theta >= 4 need gamma > 0");
  if (experiment == "mean" || experiment == "micro" || experiment == "energy") {
    double speed = std::sqrt(const_c1(theta));
    for (double t : times)
      if (speed * t >= 0.25) throw std::invalid_argument("times must satisfy sqrt(C1) t < 0.25");
  }
}

bool ConvergenceReport::all_pass() const {
  for (const auto& f : flags)
    if (!f.pass) return false;
  for (const auto& s : slopes)
    if (s.asserted && !s.pass) return false;
  return true;
}

void ConvergenceReport::flag(const std::string& name, bool pass, const std::string& detail) {
  flags.push_back({name, pass, detail});
}

std::vector<MetricRow> ConvergenceReport::series(const std::string& name) const {
  std::vector<MetricRow> out;
  for (const auto& m : metrics)
    if (m.name == name) out.push_back(m);
  return out;
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw std::invalid_argument("fit_loglog_slope needs at least 4 points");
  const int n = static_cast<int>(points.size());
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
      throw std::invalid_argument("fit_loglog_slope needs positive coordinates");
    lx[i] = std::log(points[i].first);
    ly[i] = std::log(points[i].second);
  }
  double mx = mean_of(lx), my = mean_of(ly), sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope needs distinct abscissae");
  SlopeFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  double se = std::sqrt(ss / (n - 2) / sxx);
  boost::math::students_t dist(n - 2);
  double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.ci_low = f.slope - q * se;
  f.ci_high = f.slope + q * se;
  return f;
}

double spread(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0)) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

bool strictly_decreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1])) return false;
  return true;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SampledData sample_initial(const InitialProfiles& prof, int n_sites) {
  LatticeGrid grid(n_sites);
  const double eps = eps_of(n_sites);
  std::vector<double> p(n_sites), l(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    double y = eps * grid.site_label(i);
    p[i] = prof.p0(y);
    l[i] = prof.l0(y);
  }
  WaveSpectrum ph = forward_transform(p), lh = forward_transform(l);
  SampledData out{MacroField(n_sites / 2, 1.0), MacroField(n_sites / 2, 1.0)};
  for (int a = 0; a < n_sites; ++a) {
    out.p.values[a] = eps * ph.values[a];
    // the ring carries no tension at k = 0 or at the Nyquist mode
    if (a != 0 && a != grid.zero_index()) out.l.values[a] = eps * lh.values[a];
  }
  return out;
}

MacroField exact_transform(const Transform& f, int n_sites) { return MacroField::sample(f, n_sites / 2, 1.0); }

// ---------------------------------------------------------------- mean dynamics

ConvergenceReport run_mean_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport rep = new_report("mean", config.theta, config.gamma, config.sites, config.seed);
  const ScalingSchedule sc = schedule(config.theta);
  InitialProfiles prof = make_initial_profiles(config.profile, config.profile_params);
  for (double t : default_times(config)) {
    std::vector<double> errs, ratios;
    for (int n : config.sites) {
      const double eps = eps_of(n);
      SampledData d = sample_initial(prof, n);
      evolve_modes(
          [&] {
            std::vector<double> xi(n);
            for (int i = 0; i < n; ++i) xi[i] = d.p.xi(i);
            return xi;
          }(),
          d.p.values, d.l.values, [&](double xi) { return a_eps(xi, eps, config.theta, config.gamma); }, t);
      WaveSolution w = solve_wave(exact_transform(prof.p0_t, n), exact_transform(prof.l0_t, n), t, config.theta);
      double err = std::sqrt(l2_gap(d.p, w.p_tilde) + l2_gap(d.l, w.l_tilde));
      double env = t * sc.b(eps);
      double ratio = t > 0.0 ? err / env : 0.0;
      rep.metrics.push_back({"l2_error", config.theta, n, eps, t, err, env, ratio, 0.0, config.gamma});
      errs.push_back(err);
      if (t > 0.0) ratios.push_back(ratio);
    }
    std::string tag = "t=" + fmt(t);
    if (t > 0.0) {
      rep.flag("decreasing_in_N " + tag, strictly_decreasing(errs));
      double s = spread(ratios);
      rep.flag("ratio_band " + tag, s <= config.band, "max/min of error/(t b) = " + fmt(s));
    } else {
      rep.flag("sampling_floor_decreasing " + tag, errs.size() < 2 || errs.back() <= errs.front(),
               "first " + fmt(errs.front()) + " last " + fmt(errs.back()));
    }
  }
  return rep;
}

// ---------------------------------------------------------------- micro runs

namespace {

struct MicroSpectra {
  RunningMean p, l;
  std::vector<std::vector<double>> pairings;  // [test function][replica]
};

// evolves `replicas` copies of the phononic data for microscopic time `duration`;
// `visit` sees each final state with its replica index
void run_replicas(const Chain& chain, const InitialProfiles& prof, int replicas, int threads, double duration,
                  const std::function<void(int, const ChainState&)>& visit) {
  parallel_for(replicas, threads, [&](int r) {
    ChainState s = chain.init_phononic(prof.p0, prof.l0, static_cast<std::uint64_t>(r));
    chain.advance(s, duration);
    visit(r, s);
  });
}

SimConfig sim_config(const ExperimentConfig& c, int n) {
  SimConfig s;
  s.n_sites = n;
  s.theta = c.theta;
  s.gamma = c.gamma;
  s.dt = c.dt;
  s.seed = c.seed;
  return s;
}

}  // namespace

ConvergenceReport run_micro_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport rep = new_report("micro", config.theta, config.gamma, config.sites, config.seed);
  const ScalingSchedule sc = schedule(config.theta);
  InitialProfiles prof = make_initial_profiles(config.profile, config.profile_params);
  const double c1 = const_c1(config.theta);
  std::map<int, double> floor;
  for (double t : default_times(config)) {
    std::vector<double> errs, rl;
    for (int n : config.sites) {
      const double eps = eps_of(n);
      Chain chain(sim_config(config, n));
      std::vector<SampledData> finals(config.replicas, {MacroField(n / 2, 1.0), MacroField(n / 2, 1.0)});
      run_replicas(chain, prof, config.replicas, config.threads, t / sc.j(eps),
                   [&](int r, const ChainState& s) { finals[r] = scaled_pl(s.spectrum); });
      RunningMean pm(n), lm(n);
      for (const auto& f : finals) {
        pm.add(f.p.values);
        lm.add(f.l.values);
      }
      MacroField p_mean(n / 2, 1.0), l_mean(n / 2, 1.0);
      p_mean.values = pm.mean();
      l_mean.values = lm.mean();
      WaveSolution w = solve_wave(exact_transform(prof.p0_t, n), exact_transform(prof.l0_t, n), t, config.theta);
      double err = std::sqrt(l2_gap(p_mean, w.p_tilde) + l2_gap(l_mean, w.l_tilde));
      double mc = std::sqrt(pm.se2_total() + lm.se2_total());
      if (t == 0.0) floor[n] = err;
      double fl = floor.count(n) ? floor[n] : 0.0;
      rep.metrics.push_back({"l2_error", config.theta, n, eps, t, err, fl, fl > 0.0 ? err / fl : 0.0, mc, config.gamma});
      errs.push_back(err);

      // generalized tension against the nearest-neighbour stretch
      const auto& omg = chain.dispersion().omega;
      MacroField r_field(n / 2, 1.0);
      for (int a = 1; a < n; ++a) {
        double k = chain.grid().k(a);
        if (k == 0.0) continue;
        cplx num = 1.0 - std::polar(1.0, -2.0 * pi * k);
        r_field.values[a] = num / cplx(0.0, lattice_sign(k) * omg[a]) * l_mean.values[a];
      }
      double lnorm = std::sqrt(l2_norm2(l_mean));
      double gap;
      std::string name;
      if (config.theta > 3.0) {
        MacroField diff = r_field;
        for (int a = 0; a < n; ++a) diff.values[a] -= l_mean.values[a] / std::sqrt(c1);
        gap = std::sqrt(l2_norm2(diff));
        name = "r_minus_l_over_sqrt_c1";
      } else {
        gap = std::sqrt(l2_norm2(r_field));
        name = "r_norm";
      }
      rep.metrics.push_back({name, config.theta, n, eps, t, gap, lnorm, lnorm > 0.0 ? gap / lnorm : 0.0, 0.0, config.gamma});
      rl.push_back(gap);
      if (n == config.sites.back() && t == default_times(config).back()) add_profiles(rep, w, n, config.theta);
    }
    std::string tag = "t=" + fmt(t);
    if (t > 0.0) {
      rep.flag("decreasing_in_N " + tag, strictly_decreasing(errs));
      int last = config.sites.back();
      double ratio = errs.back() / floor[last];
      rep.flag("below_4x_floor " + tag, ratio < 4.0,
               "error " + fmt(errs.back()) + " vs t=0 floor " + fmt(floor[last]));
      if (rl.front() > 0.0) rep.flag("tension_relation_decreasing " + tag, strictly_decreasing(rl));
    }
  }
  return rep;
}

ConvergenceReport run_energy_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport rep = new_report("energy", config.theta, config.gamma, config.sites, config.seed);
  const ScalingSchedule sc = schedule(config.theta);
  InitialProfiles prof = make_initial_profiles(config.profile, config.profile_params);
  auto tests = default_test_functions();
  const int nt = static_cast<int>(tests.size());
  for (double t : default_times(config)) {
    for (int n : config.sites) {
      const double eps = eps_of(n);
      Chain chain(sim_config(config, n));
      std::vector<std::vector<double>> pair(nt, std::vector<double>(config.replicas));
      run_replicas(chain, prof, config.replicas, config.threads, t / sc.j(eps), [&](int r, const ChainState& s) {
        auto e = chain.energy_field(s);
        for (int i = 0; i < nt; ++i) pair[i][r] = empirical_pairing(e, tests[i].value, eps);
      });
      WaveSolution w = solve_wave(exact_transform(prof.p0_t, n), exact_transform(prof.l0_t, n), t, config.theta);
      for (int i = 0; i < nt; ++i) {
        double micro = mean_of(pair[i]);
        double macro = energy_functional(w, tests[i], config.theta);
        double rel = std::abs(micro - macro) / std::abs(macro);
        rep.metrics.push_back({"energy_pairing " + tests[i].name, config.theta, n, eps, t, micro, macro, rel,
                               std_error(pair[i]), config.gamma});
        if (n == config.sites.back())
          rep.flag("energy_within_10pct " + tests[i].name + " t=" + fmt(t), rel <= 0.1, "relative gap " + fmt(rel));
      }
      if (n == config.sites.back() && t == default_times(config).back()) add_profiles(rep, w, n, config.theta);
    }
  }

  // kinetic-only data at t = 0: the pairing is a Riemann sum of p0^2 J / 2
  InitialProfiles mom = make_initial_profiles("momentum_only", config.profile_params);
  const int n = config.sites.back();
  const double eps = eps_of(n);
  Chain chain(sim_config(config, n));
  ChainState s = chain.init_phononic(mom.p0, mom.l0, 0);
  auto e = chain.energy_field(s);
  WaveSolution w0 = solve_wave(exact_transform(mom.p0_t, n), exact_transform(mom.l0_t, n), 0.0, config.theta);
  for (int i = 0; i < nt; ++i) {
    using boost::math::quadrature::gauss;
    double exact = 0.0;
    const int panels = 400;
    for (int q = 0; q < panels; ++q) {
      double lo = -0.5 + q / static_cast<double>(panels), hi = lo + 1.0 / panels;
      exact += gauss<double, 20>::integrate([&](double y) {
        double p = mom.p0(y);
        return 0.5 * p * p * tests[i].value(y);
      }, lo, hi);
    }
    double micro = empirical_pairing(e, tests[i].value, eps);
    double macro = energy_functional(w0, tests[i], config.theta);
    double gap = std::max(std::abs(micro - exact), std::abs(macro - exact));
    rep.metrics.push_back({"kinetic_t0 " + tests[i].name, config.theta, n, eps, 0.0, micro, exact, gap, 0.0, config.gamma});
    rep.flag("kinetic_t0 " + tests[i].name, gap <= 1e-9 * std::max(1.0, std::abs(exact)),
             "micro " + fmt(micro) + " macro " + fmt(macro) + " exact " + fmt(exact));
  }
  return rep;
}

// ---------------------------------------------------------------- fluctuations

ConvergenceReport run_fluc_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport rep = new_report("fluc", config.theta, config.gamma, config.sites, config.seed);
  const ScalingSchedule sc = schedule(config.theta);
  InitialProfiles prof = make_initial_profiles(config.profile, config.profile_params);
  for (double t : default_times(config)) {
    std::vector<double> errs, ratios;
    for (int n : config.sites) {
      const double eps = eps_of(n);
      SampledData d = sample_initial(prof, n);
      MacroField fp = d.p, fm = d.p;
      for (int i = 0; i < n; ++i) {
        fp.values[i] = d.p.values[i] + d.l.values[i];
        fm.values[i] = d.p.values[i] - d.l.values[i];
      }
      std::vector<double> xi(n);
      for (int i = 0; i < n; ++i) xi[i] = fp.xi(i);
      evolve_modes(xi, fp.values, fm.values, [&](double x) { return m_eps(x, eps, config.theta, config.gamma); }, t);
      MacroField p0 = exact_transform(prof.p0_t, n), l0 = exact_transform(prof.l0_t, n);
      MacroField gp = p0, gm = p0;
      for (int i = 0; i < n; ++i) {
        gp.values[i] = p0.values[i] + l0.values[i];
        gm.values[i] = p0.values[i] - l0.values[i];
      }
      FlucSolution f = solve_fluc(gp, gm, t, config.theta, config.gamma);
      double err = std::sqrt(l2_gap(fp, f.f_plus) + l2_gap(fm, f.f_minus));
      double env = t * sc.r(eps);
      double ratio = t > 0.0 ? err / env : 0.0;
      rep.metrics.push_back({"l2_error", config.theta, n, eps, t, err, env, ratio, 0.0, config.gamma});
      errs.push_back(err);
      if (t > 0.0) ratios.push_back(ratio);

      if (t > 0.0 && config.theta < 4.0) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
          worst = std::max({worst, std::abs(std::abs(f.f_plus.values[i]) - std::abs(gp.values[i])),
                            std::abs(std::abs(f.f_minus.values[i]) - std::abs(gm.values[i]))});
        rep.metrics.push_back({"limit_modulus_drift", config.theta, n, eps, t, worst, 0.0, 0.0, 0.0, config.gamma});
        if (n == config.sites.back()) rep.flag("limit_preserves_modulus t=" + fmt(t), worst <= 1e-14);
      }
      if (t > 0.0 && config.theta > 4.0 && n == config.sites.back()) {
        // M = -c [[1,1],[1,1]]: eigenvalues 0 and -2c on (1,-1) and (1,1)
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
          double x = xi[i];
          double c = 1.5 * config.gamma * std::pow(2.0 * pi * x, 2);
          double e = std::exp(-2.0 * c * t);
          ModeMatrix closed;
          closed.e = {0.5 * (1.0 + e), 0.5 * (e - 1.0), 0.5 * (e - 1.0), 0.5 * (1.0 + e)};
          ModeMatrix diff = expm2(m_limit(x, config.theta, config.gamma), t) - closed;
          worst = std::max(worst, opnorm2(diff));
        }
        rep.metrics.push_back({"limit_closed_form_gap", config.theta, n, eps, t, worst, 0.0, 0.0, 0.0, config.gamma});
        rep.flag("limit_matches_closed_form t=" + fmt(t), worst <= 1e-12, "max gap " + fmt(worst));
      }
    }
    std::string tag = "t=" + fmt(t);
    if (t > 0.0) {
      double s = spread(ratios);
      rep.flag("ratio_band " + tag, s <= config.band, "max/min of error/(t r) = " + fmt(s));
    }
  }
  // fluctuations live at microscopic time t / n, so the largest n is the fastest scale; it peaks at theta = 3
  const double e12 = std::ldexp(1.0, -12);
  double n3 = schedule(3.0).n(e12), n25 = schedule(2.5).n(e12), n35 = schedule(3.5).n(e12);
  rep.flag("n_theta_ordering", n3 > n25 && n3 > n35,
           "n(2.5)=" + fmt(n25) + " n(3)=" + fmt(n3) + " n(3.5)=" + fmt(n35));
  return rep;
}

ConvergenceReport run_lln_convergence(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport rep = new_report("lln", config.theta, config.gamma, config.sites, config.seed);
  const ScalingSchedule sc = schedule(config.theta);
  InitialProfiles prof = make_initial_profiles(config.profile, config.profile_params);
  auto tests = default_test_functions();
  const int nt = static_cast<int>(tests.size());
  for (double t : default_times(config)) {
    std::vector<double> devs, devs0;
    for (int n : config.sites) {
      const double eps = eps_of(n);
      const double shift = t / sc.m(eps);
      MacroField p0 = exact_transform(prof.p0_t, n), l0 = exact_transform(prof.l0_t, n);
      MacroField gp = p0, gm = p0;
      for (int i = 0; i < n; ++i) {
        gp.values[i] = p0.values[i] + l0.values[i];
        gm.values[i] = p0.values[i] - l0.values[i];
      }
      FlucSolution lim = solve_fluc(gp, gm, t, config.theta, config.gamma);
      // recentered test functions S(t/m) J on the integer grid, evaluated at -xi
      std::vector<std::vector<cplx>> jp(nt, std::vector<cplx>(n)), jm(nt, std::vector<cplx>(n));
      std::vector<double> target_p(nt), target_m(nt);
      for (int q = 0; q < nt; ++q) {
        cplx ap = 0.0, am = 0.0;
        for (int i = 0; i < n; ++i) {
          double x = gp.xi(i);
          cplx jt = tests[q].transform(-x);
          jp[q][i] = semigroup_multiplier(-x, shift, +1, config.theta) * jt;
          jm[q][i] = semigroup_multiplier(-x, shift, -1, config.theta) * jt;
          ap += lim.f_plus.values[i] * jt;
          am += lim.f_minus.values[i] * jt;
        }
        target_p[q] = ap.real();
        target_m[q] = am.real();
      }
      auto deviation = [&](const ChainState& s) {
        SampledData d = scaled_pl(s.spectrum);
        double acc = 0.0;
        for (int q = 0; q < nt; ++q) {
          cplx pp = 0.0, pm = 0.0;
          for (int i = 0; i < n; ++i) {
            pp += (d.p.values[i] + d.l.values[i]) * jp[q][i];
            pm += (d.p.values[i] - d.l.values[i]) * jm[q][i];
          }
          acc += std::abs(pp.real() - target_p[q]) + std::abs(pm.real() - target_m[q]);
        }
        return acc / (2.0 * nt);
      };
      Chain chain(sim_config(config, n));
      std::vector<double> dev(config.replicas);
      run_replicas(chain, prof, config.replicas, config.threads, t / sc.n(eps),
                   [&](int r, const ChainState& s) { dev[r] = deviation(s); });
      double md = mean_of(dev);
      rep.metrics.push_back({"mean_abs_deviation", config.theta, n, eps, t, md, 0.0, 0.0, std_error(dev), config.gamma});
      devs.push_back(md);

      // noiseless companion with the same data
      ExperimentConfig quiet = config;
      quiet.gamma = 0.0;
      Chain still(sim_config(quiet, n));
      ChainState s0 = still.init_phononic(prof.p0, prof.l0, 0);
      still.advance(s0, t / sc.n(eps));
      double d0 = deviation(s0);
      rep.metrics.push_back({"deviation_gamma0", config.theta, n, eps, t, d0, md, md > 0.0 ? d0 / md : 0.0, 0.0, 0.0});
      devs0.push_back(d0);
    }
    std::string tag = "t=" + fmt(t);
    rep.flag("deviation_decreasing " + tag, strictly_decreasing(devs));
    if (config.gamma > 0.0) {
      bool below = true;
      for (std::size_t i = 0; i < devs.size(); ++i) below = below && devs0[i] < devs[i];
      rep.flag("gamma0_below_noisy " + tag, below);
    }
  }
  return rep;
}

// ---------------------------------------------------------------- bounds

ConvergenceReport verify_bounds(const BoundsConfig& cfg) {
  ConvergenceReport rep = new_report("bounds", 0.0, 0.0, {}, 0);
  const auto ks = linspace(-cfg.norm_k, cfg.norm_k, cfg.norm_k_points);
  const auto ts = linspace(0.0, cfg.t_max, cfg.t_points);
  for (double theta : cfg.thetas) {
    double sup_ae = 0.0, sup_a = 0.0, sup_me = 0.0, sup_m = 0.0, max_re = -1e300;
    bool has_m = theta > 2.0;
    for (double k : ks) {
      ModeMatrix al = a_limit(k, theta);
      for (double t : ts) sup_a = std::max(sup_a, opnorm2(expm2(al, t)));
    }
    for (double gamma : cfg.gammas) {
      for (int e : cfg.eps_log2) {
        double eps = std::ldexp(1.0, -e);
        for (double k : ks) {
          ModeMatrix a = a_eps(k, eps, theta, gamma);
          double scale = std::max(1.0, opnorm2(a));
          for (auto lam : eigenvalues(a)) max_re = std::max(max_re, lam.real() / scale);
          for (double t : ts) sup_ae = std::max(sup_ae, opnorm2(expm2(a, t)));
          if (has_m) {
            ModeMatrix m = m_eps(k, eps, theta, gamma);
            double ms = std::max(1.0, opnorm2(m));
            for (auto lam : eigenvalues(m)) max_re = std::max(max_re, lam.real() / ms);
            for (double t : ts) sup_me = std::max(sup_me, opnorm2(expm2(m, t)));
          }
        }
      }
      if (has_m)
        for (double k : ks) {
          ModeMatrix m = m_limit(k, theta, gamma);
          for (double t : ts) sup_m = std::max(sup_m, opnorm2(expm2(m, t)));
        }
    }
    std::string tag = " theta=" + fmt(theta);
    rep.metrics.push_back({"sup_exp_a_eps", theta, 0, 0.0, cfg.t_max, sup_ae, cfg.norm_pin, sup_ae / cfg.norm_pin, 0.0});
    rep.metrics.push_back({"sup_exp_a_limit", theta, 0, 0.0, cfg.t_max, sup_a, cfg.norm_pin, sup_a / cfg.norm_pin, 0.0});
    rep.metrics.push_back({"max_relative_eig_real", theta, 0, 0.0, 0.0, max_re, 0.0, 0.0, 0.0});
    rep.flag("exp_norm_pin" + tag, sup_ae <= cfg.norm_pin && sup_a <= cfg.norm_pin &&
                                       (!has_m || (sup_me <= cfg.norm_pin && sup_m <= cfg.norm_pin)),
             "A_eps " + fmt(sup_ae) + " A " + fmt(sup_a) + (has_m ? " M_eps " + fmt(sup_me) + " M " + fmt(sup_m) : ""));
    rep.flag("eigen_real_nonpositive" + tag, max_re <= 1e-12, "max Re(lambda)/|A| = " + fmt(max_re));
    if (has_m) {
      rep.metrics.push_back({"sup_exp_m_eps", theta, 0, 0.0, cfg.t_max, sup_me, cfg.norm_pin, sup_me / cfg.norm_pin, 0.0});
      rep.metrics.push_back({"sup_exp_m_limit", theta, 0, 0.0, cfg.t_max, sup_m, cfg.norm_pin, sup_m / cfg.norm_pin, 0.0});
    }
  }

  // remainder rates
  auto rate_ks = linspace(cfg.rate_k / cfg.rate_k_points, cfg.rate_k, cfg.rate_k_points);
  auto sweep = [&](const std::string& name, double theta, double gamma, RateLaw law,
                   const std::function<ModeMatrix(double, double)>& rem_at, bool assert_slope) {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> ratios;
    for (int e : cfg.eps_log2) {
      double eps = std::ldexp(1.0, -e);
      double sup = 0.0;
      for (double k : rate_ks) sup = std::max({sup, opnorm2(rem_at(k, eps)), opnorm2(rem_at(-k, eps))});
      RateLaw l = law;
      double env = l.log_power < 0 ? 1.0 / std::log(1.0 / eps)
                                   : std::pow(eps, l.exponent) * (l.log_power > 0 ? std::log(1.0 / eps) : 1.0);
      rep.metrics.push_back({name, theta, 0, eps, 0.0, sup, env, sup / env, 0.0, gamma});
      pts.push_back({eps, sup});
      ratios.push_back(sup / env);
    }
    std::string tag = name + " theta=" + fmt(theta) + " gamma=" + fmt(gamma);
    std::vector<std::pair<double, double>> inner(pts.begin() + 1, pts.end() - 1);
    SlopeFit fit = fit_loglog_slope(inner.size() >= 4 ? inner : pts);
    if (law.log_power == 0) {
      SlopeRecord rec{tag, theta, fit, law.exponent, cfg.slope_tolerance, assert_slope, true};
      rec.pass = std::abs(fit.slope - law.exponent) <= cfg.slope_tolerance;
      rep.slopes.push_back(rec);
    } else {
      SlopeRecord rec{tag, theta, fit, law.exponent, 0.0, false, true};
      rep.slopes.push_back(rec);
      double s = spread(ratios);
      if (assert_slope) rep.flag("envelope_band " + tag, s <= cfg.log_band, "max/min ratio " + fmt(s));
    }
  };
  for (double theta : cfg.thetas) {
    // b-table exponent is reported, not asserted, below theta = 2
    bool assert_b = theta >= 2.0;
    sweep("sup_norm_B", theta, 0.0, b_rate(theta),
          [&](double k, double eps) { return b_rem(k, eps, theta, 0.0); }, assert_b);
    sweep("sup_norm_B", theta, 1.0, b_rate(theta),
          [&](double k, double eps) { return b_rem(k, eps, theta, 1.0); }, false);
    // the noise entries of Rem fall like gamma eps^((theta-1)/2) for theta < 3, which outweighs the
    // dispersive term the r-table tracks over any reachable eps; assert at gamma = 0 as for B
    if (theta > 2.0) {
      sweep("sup_norm_Rem", theta, 0.0, r_rate(theta),
            [&](double k, double eps) { return rem(k, eps, theta, 0.0); }, true);
      sweep("sup_norm_Rem", theta, 1.0, r_rate(theta),
            [&](double k, double eps) { return rem(k, eps, theta, 1.0); }, false);
    }
  }

  // small-frequency expansions of the dispersion
  for (double theta : cfg.thetas) {
    PotentialSpec spec{theta};
    std::vector<double> ratios;
    std::vector<std::pair<double, double>> pts;
    for (int m = 10; m <= 20; ++m) {
      double k = std::ldexp(1.0, -m);
      Prediction pr = asymptotic_prediction(k, spec);
      double remv = std::abs(alpha_hat(k, spec) - pr.predicted);
      double env = remainder_envelope(2.0 * pi * k, pr.remainder_exponent, pr.remainder_has_log);
      rep.metrics.push_back({"alpha_remainder", theta, 0, k, 0.0, remv, env, remv / env, 0.0});
      ratios.push_back(remv / env);
      if (remv > 0.0) pts.push_back({k, remv});
    }
    rep.flag("alpha_remainder_bounded theta=" + fmt(theta), non_growing(ratios, 5.0),
             "ratio at k=2^-10 " + fmt(ratios.front()) + ", at 2^-20 " + fmt(ratios.back()));
    if (pts.size() >= 4) {
      SlopeFit f = fit_loglog_slope(pts);
      rep.slopes.push_back({"alpha_remainder_exponent theta=" + fmt(theta), theta, f,
                            asymptotic_prediction(0.01, spec).remainder_exponent, 0.0, false, true});
    }
    std::vector<double> cross;
    for (int m = 8; m <= 16; ++m) {
      double k = std::ldexp(1.0, -m);
      CrossCheck c = cross_asymptotic_check(k, -0.375 * k, spec);
      double r = std::abs(c.lhs - c.rhs) / (std::pow(2.0 * pi, 2) * c.remainder_bound);
      rep.metrics.push_back({"cross_remainder", theta, 0, k, 0.0, std::abs(c.lhs - c.rhs), c.remainder_bound, r, 0.0});
      cross.push_back(r);
    }
    rep.flag("cross_remainder_bounded theta=" + fmt(theta), non_growing(cross, 5.0),
             "ratio at k=2^-8 " + fmt(cross.front()) + ", at 2^-16 " + fmt(cross.back()));
  }
  return rep;
}

ConvergenceReport dispersion_asymptotics(const std::vector<double>& thetas) {
  ConvergenceReport rep = new_report("dispersion", 0.0, 0.0, {}, 0);
  for (double theta : thetas) {
    PotentialSpec spec{theta};
    std::string tag = " theta=" + fmt(theta);
    std::vector<std::pair<double, double>> pts;
    for (int m = 10; m <= 20; ++m) {
      double k = std::ldexp(1.0, -m);
      pts.push_back({k, alpha_hat(k, spec)});
    }
    SlopeFit f = fit_loglog_slope(pts);
    double expected = std::min(theta - 1.0, 2.0);
    if (theta == 3.0) {
      rep.slopes.push_back({"alpha_slope" + tag, theta, f, expected, 0.0, false, true});
      std::vector<double> ratios;
      for (int m = 10; m <= 20; ++m) {
        double k = std::ldexp(1.0, -m), mu = 2.0 * pi * k;
        double r = alpha_hat(k, spec) / (mu * mu * std::log(1.0 / mu));
        ratios.push_back(r);
        rep.metrics.push_back({"log_leading_ratio", theta, 0, k, 0.0, r, 1.0, r, 0.0});
      }
      double s = spread(ratios);
      bool ok = s <= 2.0 && ratios.back() > 0.5 && ratios.back() < 2.0;
      rep.flag("log_leading_tracks" + tag, ok, "ratio spread " + fmt(s) + ", last " + fmt(ratios.back()));
      continue;
    }
    SlopeRecord rec{"alpha_slope" + tag, theta, f, expected, 0.02, true, true};
    rec.pass = std::abs(f.slope - expected) <= 0.02;
    rep.slopes.push_back(rec);
    if (theta > 2.0) {
      double k = std::ldexp(1.0, -16), mu = 2.0 * pi * k;
      double c1 = const_c1(theta), c2 = const_c2(theta);
      double lead = c1 * std::pow(mu, expected);
      // the second-order monomial is mu^2 below theta = 3 and mu^(theta-1) above
      double second = theta < 3.0 ? 2.0 : (theta < 5.0 ? theta - 1.0 : 4.0);
      double ratio = (alpha_hat(k, spec) - lead) / std::pow(mu, second);
      double rel = std::abs(ratio / c2 - 1.0);
      rep.metrics.push_back({"second_order_ratio", theta, 0, k, 0.0, ratio, c2, rel, 0.0});
      if (theta < 5.0 && theta != 3.0)
        rep.flag("second_order_ratio" + tag, rel <= 0.01, "ratio " + fmt(ratio) + " vs C2 " + fmt(c2));
    }
  }
  return rep;
}

ConvergenceReport run_experiment(const ExperimentConfig& config, const BoundsConfig& bounds) {
  auto start = std::chrono::steady_clock::now();
  ConvergenceReport rep;
  if (config.experiment == "mean") rep = run_mean_convergence(config);
  else if (config.experiment == "micro") rep = run_micro_convergence(config);
  else if (config.experiment == "energy") rep = run_energy_convergence(config);
  else if (config.experiment == "fluc") rep = run_fluc_convergence(config);
  else if (config.experiment == "lln") rep = run_lln_convergence(config);
  else if (config.experiment == "bounds") rep = verify_bounds(bounds);
  else {
    config.validate();
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chainlab
