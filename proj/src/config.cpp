#include "chainlab/config.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>

namespace chainlab {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw UsageError("invalid value '" + text + "' for key '" + key + "'");
  return v;
}

// parses text as the JSON kind of `like`
json parse_as(const std::string& key, const json& like, const std::string& text) {
  switch (like.type()) {
    case json::value_t::number_float: return parse_number<double>(key, text);
    case json::value_t::number_unsigned: return parse_number<std::uint64_t>(key, text);
    case json::value_t::number_integer: return parse_number<std::int64_t>(key, text);
    case json::value_t::boolean:
      if (text == "true") return true;
      if (text == "false") return false;
      throw UsageError("invalid boolean '" + text + "' for key '" + key + "'");
    case json::value_t::string: return text;
    case json::value_t::array: {
      json elem = like.empty() ? json(0.0) : like.front();
      json arr = json::array();
      for (const auto& item : split_list(text)) arr.push_back(parse_as(key, elem, item));
      return arr;
    }
    default: throw UsageError("key '" + key + "' cannot be overridden");
  }
}

bool is_number(const json& v) { return v.is_number(); }

// file values must match the default's kind; integers are accepted where floats are expected
json coerce(const std::string& key, const json& like, const json& v) {
  if (like.is_number_float() && is_number(v)) return v.get<double>();
  if (like.is_number_unsigned() && v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return v.get<std::uint64_t>();
  if (like.is_number_integer() && !like.is_number_unsigned() && v.is_number_integer()) return v.get<std::int64_t>();
  if (like.is_string() && v.is_string()) return v;
  if (like.is_boolean() && v.is_boolean()) return v;
  if (like.is_array() && v.is_array()) {
    json elem = like.empty() ? json(0.0) : like.front();
    json arr = json::array();
    for (const auto& item : v) arr.push_back(coerce(key, elem, item));
    return arr;
  }
  throw UsageError("value of key '" + key + "' has the wrong type");
}

void flatten_into(const json& node, const std::string& prefix, json& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) flatten_into(it.value(), key, out);
    else out[key] = it.value();
  }
}

}  // namespace

Config default_config() {
  ExperimentConfig e;
  BoundsConfig b;
  Config c;
  c["experiment"] = e.experiment;
  c["theta"] = e.theta;
  c["gamma"] = e.gamma;
  c["sites"] = e.sites;
  c["replicas"] = e.replicas;
  c["times"] = json::array();
  c["profile.kind"] = e.profile;
  c["profile.width"] = e.profile_params.width;
  c["profile.center"] = e.profile_params.center;
  c["profile.p_amplitude"] = e.profile_params.p_amplitude;
  c["profile.l_amplitude"] = e.profile_params.l_amplitude;
  c["seed"] = std::uint64_t{0};
  c["threads"] = e.threads;
  c["dt"] = e.dt;
  c["band"] = e.band;
  c["bounds.thetas"] = b.thetas;
  c["bounds.gammas"] = b.gammas;
  c["bounds.eps_log2"] = b.eps_log2;
  c["bounds.norm_k"] = b.norm_k;
  c["bounds.norm_k_points"] = b.norm_k_points;
  c["bounds.t_max"] = b.t_max;
  c["bounds.t_points"] = b.t_points;
  c["bounds.norm_pin"] = b.norm_pin;
  c["bounds.rate_k"] = b.rate_k;
  c["bounds.rate_k_points"] = b.rate_k_points;
  c["bounds.slope_tolerance"] = b.slope_tolerance;
  c["bounds.log_band"] = b.log_band;
  c["simulate.duration"] = 50.0;
  c["dispersion.points"] = 17;
  return c;
}

Config flatten(const nlohmann::ordered_json& nested) {
  if (!nested.is_object()) throw UsageError("configuration must be a JSON object");
  Config out = Config::object();
  flatten_into(nested, "", out);
  return out;
}

void merge_config(Config& cfg, const nlohmann::ordered_json& file_values) {
  Config flat = flatten(file_values);
  for (auto it = flat.begin(); it != flat.end(); ++it) {
    if (!cfg.contains(it.key())) throw UsageError("unknown configuration key '" + it.key() + "'");
    cfg[it.key()] = coerce(it.key(), cfg[it.key()], it.value());
  }
}

void apply_override(Config& cfg, const std::string& key, const std::string& value) {
  if (!cfg.contains(key)) throw UsageError("unknown configuration key '" + key + "'");
  // empty arrays carry no element type; times are reals
  cfg[key] = parse_as(key, cfg[key], value);
}

ExperimentConfig to_experiment(const Config& c) {
  ExperimentConfig e;
  e.experiment = c.at("experiment").get<std::string>();
  e.theta = c.at("theta").get<double>();
  e.gamma = c.at("gamma").get<double>();
  e.sites = c.at("sites").get<std::vector<int>>();
  e.replicas = c.at("replicas").get<int>();
  e.times = c.at("times").get<std::vector<double>>();
  e.profile = c.at("profile.kind").get<std::string>();
  e.profile_params.width = c.at("profile.width").get<double>();
  e.profile_params.center = c.at("profile.center").get<double>();
  e.profile_params.p_amplitude = c.at("profile.p_amplitude").get<double>();
  e.profile_params.l_amplitude = c.at("profile.l_amplitude").get<double>();
  e.seed = c.at("seed").get<std::uint64_t>();
  e.threads = c.at("threads").get<int>();
  e.dt = c.at("dt").get<double>();
  e.band = c.at("band").get<double>();
  return e;
}

BoundsConfig to_bounds(const Config& c) {
  BoundsConfig b;
  b.thetas = c.at("bounds.thetas").get<std::vector<double>>();
  b.gammas = c.at("bounds.gammas").get<std::vector<double>>();
  b.eps_log2 = c.at("bounds.eps_log2").get<std::vector<int>>();
  b.norm_k = c.at("bounds.norm_k").get<double>();
  b.norm_k_points = c.at("bounds.norm_k_points").get<int>();
  b.t_max = c.at("bounds.t_max").get<double>();
  b.t_points = c.at("bounds.t_points").get<int>();
  b.norm_pin = c.at("bounds.norm_pin").get<double>();
  b.rate_k = c.at("bounds.rate_k").get<double>();
  b.rate_k_points = c.at("bounds.rate_k_points").get<int>();
  b.slope_tolerance = c.at("bounds.slope_tolerance").get<double>();
  b.log_band = c.at("bounds.log_band").get<double>();
  return b;
}

}  // namespace chainlab
