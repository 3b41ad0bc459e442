#include "chainlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json report_json(const ConvergenceReport& rep, const nlohmann::ordered_json& config) {
  using J = nlohmann::ordered_json;
  J j;
  j["experiment"] = rep.experiment;
  j["theta"] = rep.theta;
  j["gamma"] = rep.gamma;
  j["grid"] = rep.grid;
  j["seed"] = rep.seed;
  j["config"] = config;
  J metrics = J::array();
  for (const auto& m : rep.metrics)
    metrics.push_back({{"name", m.name}, {"theta", m.theta}, {"n_sites", m.n_sites}, {"eps", finite_or_null(m.eps)},
                       {"time", m.time}, {"value", finite_or_null(m.value)},
                       {"reference", finite_or_null(m.reference)}, {"ratio", finite_or_null(m.ratio)},
                       {"std_error", finite_or_null(m.std_error)}, {"gamma", m.gamma}});
  j["metrics"] = metrics;
  J slopes = J::array();
  for (const auto& s : rep.slopes)
    slopes.push_back({{"name", s.name}, {"theta", s.theta}, {"slope", finite_or_null(s.fit.slope)},
                      {"intercept", finite_or_null(s.fit.intercept)}, {"residual", finite_or_null(s.fit.residual)},
                      {"ci", {finite_or_null(s.fit.ci_low), finite_or_null(s.fit.ci_high)}},
                      {"points", s.fit.points}, {"expected", s.expected}, {"tolerance", s.tolerance},
                      {"asserted", s.asserted}, {"pass", s.pass}});
  j["slopes"] = slopes;
  J flags = J::array();
  for (const auto& f : rep.flags) flags.push_back({{"name", f.name}, {"pass", f.pass}, {"detail", f.detail}});
  j["flags"] = flags;
  j["pass"] = rep.all_pass();
  return j;
}

void emit_report(const ConvergenceReport& rep, const std::filesystem::path& dir, const nlohmann::ordered_json& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  write_text(dir / "report.json", report_json(rep, config).dump(2) + "\n");

  // row groups keyed by theta, insertion order inside a group
  std::vector<MetricRow> rows = rep.metrics;
  std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) { return a.theta < b.theta; });
  std::ostringstream m;
  m << "experiment,name,theta,gamma,n_sites,eps,time,value,reference,ratio,std_error\n";
  for (const auto& r : rows)
    m << csv_field(rep.experiment) << ',' << csv_field(r.name) << ',' << format_double(r.theta) << ',' << format_double(r.gamma) << ',' << r.n_sites
      << ',' << format_double(r.eps) << ',' << format_double(r.time) << ',' << format_double(r.value) << ','
      << format_double(r.reference) << ',' << format_double(r.ratio) << ',' << format_double(r.std_error) << '\n';
  write_text(dir / "metrics.csv", m.str());

  std::ostringstream p;
  p << "theta,n_sites,time,y,p_bar,l_bar,e_bar\n";
  for (const auto& r : rep.profiles)
    p << format_double(r.theta) << ',' << r.n_sites << ',' << format_double(r.time) << ',' << format_double(r.y) << ','
      << format_double(r.p_bar) << ',' << format_double(r.l_bar) << ',' << format_double(r.e_bar) << '\n';
  write_text(dir / "profiles.csv", p.str());

  if (rep.experiment == "bounds") {
    std::ostringstream b;
    b << "kind,theta,gamma,eps,sup_norm,envelope,ratio\n";
    for (const auto& r : rows)
      if (r.name == "sup_norm_B" || r.name == "sup_norm_Rem")
        b << r.name << ',' << format_double(r.theta) << ',' << format_double(r.gamma) << ',' << format_double(r.eps)
          << ',' << format_double(r.value) << ',' << format_double(r.reference) << ',' << format_double(r.ratio)
          << '\n';
    write_text(dir / "rates.csv", b.str());
  }

  nlohmann::ordered_json timing;
  timing["experiment"] = rep.experiment;
  timing["wall_time_seconds"] = rep.wall_time;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace chainlab
