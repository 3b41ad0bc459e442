// chainlab command-line front end
#include "chainlab/config.hpp"
#include "chainlab/harness.hpp"
#include "chainlab/microsim.hpp"
#include "chainlab/potential.hpp"
#include "chainlab/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace chainlab;
using ojson = nlohmann::ordered_json;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string seed, theta, gamma, sites, replicas;
};

struct Resolved {
  Config config;
  std::vector<std::string> warnings;
};

Resolved resolve(const Invocation& inv) {
  Resolved r{default_config(), {}};
  if (!inv.config_path.empty()) {
    std::ifstream in(inv.config_path);
    if (!in) throw UsageError("cannot read config file '" + inv.config_path + "'");
    ojson file;
    try {
      file = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
      throw UsageError("config file '" + inv.config_path + "' is not valid JSON: " + e.what());
    }
    // a report.json or snapshot sidecar embeds its resolved config under "config"
    if (file.is_object() && file.contains("config") && file["config"].is_object()) file = file["config"];
    merge_config(r.config, file);
  }
  std::map<std::string, std::string> seen;
  for (const auto& s : inv.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    if (seen.count(key))
      r.warnings.push_back("--set " + key + " given more than once; last value '" + value + "' wins");
    seen[key] = value;
    apply_override(r.config, key, value);
  }
  if (!inv.theta.empty()) apply_override(r.config, "theta", inv.theta);
  if (!inv.gamma.empty()) apply_override(r.config, "gamma", inv.gamma);
  if (!inv.sites.empty()) apply_override(r.config, "sites", inv.sites);
  if (!inv.replicas.empty()) apply_override(r.config, "replicas", inv.replicas);
  if (!inv.seed.empty()) apply_override(r.config, "seed", inv.seed);
  return r;
}

fs::path output_dir(const Invocation& inv) {
  if (!inv.out_dir.empty()) return inv.out_dir;
  if (const char* env = std::getenv("OUTPUT_DIR")) return env;
  return "out";
}

void write_resolved(const fs::path& dir, const Resolved& r) {
  fs::create_directories(dir);
  write_text(dir / "config.json", r.config.dump(2) + "\n");
}

int cmd_constants(const Resolved& r) {
  double theta = r.config.at("theta").get<double>();
  double c1 = const_c1(theta);
  double c2 = theta > 2.0 ? const_c2(theta) : std::numeric_limits<double>::quiet_NaN();
  std::cout << "theta,c1,c2\n" << format_double(theta) << ',' << format_double(c1) << ',' << format_double(c2) << '\n';
  return 0;
}

int cmd_dispersion(const Resolved& r) {
  PotentialSpec spec{r.config.at("theta").get<double>()};
  spec.validate();
  int points = r.config.at("dispersion.points").get<int>();
  if (points < 2) throw UsageError("dispersion.points must be >= 2");
  std::cout << "k,alpha_hat,omega\n";
  for (int i = 0; i < points; ++i) {
    double k = 0.5 * i / (points - 1);
    std::cout << format_double(k) << ',' << format_double(alpha_hat(k, spec)) << ','
              << format_double(omega(k, spec)) << '\n';
  }
  return 0;
}

int cmd_simulate(const Resolved& r, const fs::path& dir) {
  ExperimentConfig e = to_experiment(r.config);
  SimConfig sc;
  sc.n_sites = e.sites.front();
  sc.theta = e.theta;
  sc.gamma = e.gamma;
  sc.dt = e.dt;
  sc.seed = e.seed;
  Chain chain(sc);
  InitialProfiles prof = make_initial_profiles(e.profile, e.profile_params);
  ChainState s = chain.init_phononic(prof.p0, prof.l0, 0);
  std::cerr << "simulating N=" << sc.n_sites << " theta=" << sc.theta << " gamma=" << sc.gamma << '\n';
  chain.advance(s, r.config.at("simulate.duration").get<double>());
  SiteFields f = chain.observable_fields(s);
  auto e_field = chain.energy_field(s);
  write_resolved(dir, r);
  std::ostringstream csv;
  csv << "x,p,l,r,e\n";
  for (int i = 0; i < sc.n_sites; ++i)
    csv << chain.grid().site_label(i) << ',' << format_double(f.p[i]) << ',' << format_double(f.l[i]) << ','
        << format_double(f.r[i]) << ',' << format_double(e_field[i]) << '\n';
  write_text(dir / "snapshot.csv", csv.str());
  ojson side;
  side["N"] = sc.n_sites;
  side["theta"] = sc.theta;
  side["gamma"] = sc.gamma;
  side["dt"] = chain.dt();
  side["seed"] = sc.seed;
  side["time"] = s.time;
  side["total_energy"] = chain.total_energy(s);
  side["config"] = r.config;
  side["warnings"] = r.warnings;
  write_text(dir / "snapshot.json", side.dump(2) + "\n");
  return 0;
}

int finish(const ConvergenceReport& rep, const Resolved& r, const fs::path& dir) {
  write_resolved(dir, r);
  ojson cfg = r.config;
  emit_report(rep, dir, cfg);
  int failed = 0;
  for (const auto& f : rep.flags) {
    if (!f.pass) ++failed;
    std::cerr << (f.pass ? "  ok   " : "  FAIL ") << f.name << (f.detail.empty() ? "" : "  (" + f.detail + ")")
              << '\n';
  }
  for (const auto& s : rep.slopes)
    if (s.asserted)
      std::cerr << (s.pass ? "  ok   " : "  FAIL ") << s.name << "  slope " << s.fit.slope << " expected "
                << s.expected << " +- " << s.tolerance << '\n';
  std::cerr << (rep.all_pass() ? "all checks passed" : "some checks failed") << "; outputs in " << dir << '\n';
  return rep.all_pass() ? 0 : 1;
}

int cmd_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) throw UsageError("no report.json under " + dir.string());
  ojson rep = ojson::parse(in);
  std::cout << "experiment " << rep.value("experiment", std::string("?")) << '\n';
  for (const auto& f : rep["flags"])
    std::cout << (f["pass"].get<bool>() ? "PASS " : "FAIL ") << f["name"].get<std::string>() << '\n';
  for (const auto& s : rep["slopes"])
    if (s["asserted"].get<bool>())
      std::cout << (s["pass"].get<bool>() ? "PASS " : "FAIL ") << s["name"].get<std::string>() << '\n';
  return rep.value("pass", false) ? 0 : 1;
}

void write_error(const fs::path& dir, const std::string& kind, const std::string& message) {
  try {
    fs::create_directories(dir);
    ojson err;
    err["error"] = kind;
    err["message"] = message;
    write_text(dir / "error.json", err.dump(2) + "\n");
  } catch (...) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  Invocation inv;
  CLI::App app{"chainlab: long-range harmonic chains with momentum-exchange noise"};
  app.add_option("command", inv.command, "constants | dispersion | simulate | converge | verify-bounds | report")
      ->required()
      ->check(CLI::IsMember({"constants", "dispersion", "simulate", "converge", "verify-bounds", "report"}));
  app.add_option("--config", inv.config_path, "JSON configuration file");
  app.add_option("--set", inv.sets, "key=value override (repeatable)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--out", inv.out_dir, "output directory");
  app.add_option("--seed", inv.seed, "64-bit seed");
  app.add_option("--theta", inv.theta);
  app.add_option("--gamma", inv.gamma);
  app.add_option("--sites", inv.sites, "comma separated lattice sizes");
  app.add_option("--replicas", inv.replicas);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  fs::path dir = output_dir(inv);
  try {
    Resolved r = resolve(inv);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (inv.command == "constants") return cmd_constants(r);
    if (inv.command == "dispersion") return cmd_dispersion(r);
    if (inv.command == "simulate") return cmd_simulate(r, dir);
    if (inv.command == "report") return cmd_report(dir);
    if (inv.command == "verify-bounds") {
      ConvergenceReport rep = run_experiment([&] {
        ExperimentConfig e = to_experiment(r.config);
        e.experiment = "bounds";
        return e;
      }(), to_bounds(r.config));
      return finish(rep, r, dir);
    }
    ExperimentConfig e = to_experiment(r.config);
    std::cerr << "running " << e.experiment << " theta=" << e.theta << " gamma=" << e.gamma << '\n';
    return finish(run_experiment(e, to_bounds(r.config)), r, dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    write_error(dir, "domain_error", e.what());
    return 3;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    write_error(dir, "non_convergence", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_error(dir, "runtime_error", e.what());
    return 3;
  }
}
