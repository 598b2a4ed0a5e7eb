#pragma once

#include "rellich/io.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rellich {

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// JSON has no infinity; non-finite entries are written as "inf"/"-inf"/"nan".
inline Json number_list_json(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
    else out.push_back(format_number(v));
  }
  return out;
}

struct RunConfig {
  std::string experiment;
  int dimension = 5;
  std::vector<double> couplings{1.0};
  std::string grid_type = "radial";
  std::vector<int> cells{512};        // radial cell counts
  std::vector<int> per_axis{8};       // box node counts per axis
  double outer_radius = 20.0;         // radial R
  double half_width = 3.0;            // box a
  Spacing spacing = Spacing::uniform;
  double inner_ratio = 1e-6;
  int ell_max = 8;
  std::vector<double> times{0.1};
  std::vector<double> p_list{2.0};
  std::vector<double> q_list{2.0};
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<double> distances{3.0, 5.0, 8.0, 12.0};
  int samples = 200;
  double krylov_tolerance = 1e-12;
  int quadrature_nodes = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "out";
  bool allow_supercritical = false;

  Json to_json() const {
    return Json{{"experiment", experiment},
                {"N", dimension},
                {"c", number_list_json(couplings)},
                {"grid", {{"type", grid_type},
                          {"n", cells},
                          {"m", per_axis},
                          {"R", outer_radius},
                          {"half_width", half_width},
                          {"spacing", to_string(spacing)},
                          {"inner_ratio", inner_ratio}}},
                {"sweep", {{"ell_max", ell_max},
                           {"t", number_list_json(times)},
                           {"p", number_list_json(p_list)},
                           {"q", number_list_json(q_list)},
                           {"lambda", number_list_json(lambdas)},
                           {"d", number_list_json(distances)},
                           {"samples", samples}}},
                {"tolerance", {{"krylov", krylov_tolerance}, {"quadrature_nodes", quadrature_nodes}}},
                {"seed", seed},
                {"threads", threads},
                {"allow_supercritical", allow_supercritical}};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const PreconditionError&) {
      throw ConfigError(key + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(key + ": list must not be empty");
  return out;
}

inline double parse_scalar(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 1) throw ConfigError(key + ": expected a single value");
  return v.front();
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_scalar(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(v);
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(key, text)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

}  // namespace detail

/// Fully qualified keys accepted in config files ("section.key").
inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "run.experiment", "run.seed",       "run.threads",    "run.out",          "run.allow_supercritical",
      "model.N",        "model.c",        "grid.type",      "grid.n",           "grid.m",
      "grid.R",         "grid.half_width", "grid.spacing",  "grid.inner_ratio", "sweep.ell_max",
      "sweep.t",        "sweep.p",        "sweep.q",        "sweep.lambda",     "sweep.d",
      "sweep.samples",  "tolerance.krylov", "tolerance.quadrature_nodes"};
  return keys;
}

/// Applies one fully qualified key.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = detail::trim(raw);
  if (!config_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    if (key == "run.experiment") c.experiment = value;
    else if (key == "run.seed") {
      const double v = detail::parse_scalar(key, value);
      if (v < 0 || v != std::floor(v)) throw ConfigError("run.seed: expected a non-negative integer");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "run.threads") c.threads = detail::parse_int(key, value);
    else if (key == "run.out") c.out = value;
    else if (key == "run.allow_supercritical") c.allow_supercritical = detail::parse_bool(key, value);
    else if (key == "model.N") c.dimension = detail::parse_int(key, value);
    else if (key == "model.c") c.couplings = detail::parse_list(key, value);
    else if (key == "grid.type") c.grid_type = value;
    else if (key == "grid.n") c.cells = detail::parse_int_list(key, value);
    else if (key == "grid.m") c.per_axis = detail::parse_int_list(key, value);
    else if (key == "grid.R") c.outer_radius = detail::parse_scalar(key, value);
    else if (key == "grid.half_width") c.half_width = detail::parse_scalar(key, value);
    else if (key == "grid.spacing") c.spacing = parse_spacing(value);
    else if (key == "grid.inner_ratio") c.inner_ratio = detail::parse_scalar(key, value);
    else if (key == "sweep.ell_max") c.ell_max = detail::parse_int(key, value);
    else if (key == "sweep.t") c.times = detail::parse_list(key, value);
    else if (key == "sweep.p") c.p_list = detail::parse_list(key, value);
    else if (key == "sweep.q") c.q_list = detail::parse_list(key, value);
    else if (key == "sweep.lambda") c.lambdas = detail::parse_list(key, value);
    else if (key == "sweep.d") c.distances = detail::parse_list(key, value);
    else if (key == "sweep.samples") c.samples = detail::parse_int(key, value);
    else if (key == "tolerance.krylov") c.krylov_tolerance = detail::parse_scalar(key, value);
    else if (key == "tolerance.quadrature_nodes") c.quadrature_nodes = detail::parse_int(key, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

/// Line-oriented `key = value` text with `[section]` headers and `#`
/// comments. Keys before the first header belong to [run].
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string line, section = "run";
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(number) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = section + "." + detail::trim(line.substr(0, eq));
    if (!config_keys().count(key))
      throw ConfigError("line " + std::to_string(number) + ": unknown config key '" + key + "'");
    out.emplace_back(key, detail::trim(line.substr(eq + 1)));
  }
  return out;
}

/// Invariants every run must satisfy before any computation starts.
inline void validate(const RunConfig& c) {
  if (c.dimension < 5) throw ConfigError("N >= 5 required");
  const double cstar = rellich_constant_exact(c.dimension);
  for (double cc : c.couplings)
    if (cc >= cstar && !c.allow_supercritical)
      throw ConfigError("c = " + format_number(cc) + " is not below C* = " + format_number(cstar) +
                        " (pass --allow-supercritical to explore)");
  auto nonempty = [](const auto& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string(name) + ": sweep list must not be empty");
  };
  nonempty(c.couplings, "model.c");
  nonempty(c.cells, "grid.n");
  nonempty(c.per_axis, "grid.m");
  nonempty(c.times, "sweep.t");
  nonempty(c.p_list, "sweep.p");
  nonempty(c.q_list, "sweep.q");
  nonempty(c.lambdas, "sweep.lambda");
  nonempty(c.distances, "sweep.d");
  if (c.threads < 1) throw ConfigError("run.threads must be >= 1");
  if (c.samples < 1) throw ConfigError("sweep.samples must be >= 1");
  if (c.grid_type != "radial" && c.grid_type != "box") throw ConfigError("grid.type must be radial or box");
  for (int n : c.cells)
    if (n < 16) throw ConfigError("grid.n must be >= 16");
  for (int m : c.per_axis)
    if (m < 4 || m % 2) throw ConfigError("grid.m must be even and >= 4");
  if (!(c.outer_radius > 0.0) || !(c.half_width > 0.0)) throw ConfigError("grid sizes must be positive");
  if (c.ell_max < 0) throw ConfigError("sweep.ell_max must be >= 0");
  for (double t : c.times)
    if (!(t >= 0.0)) throw ConfigError("sweep.t entries must be >= 0");
  for (double p : c.p_list)
    if (!(p >= 1.0)) throw ConfigError("sweep.p entries must be >= 1");
  for (double q : c.q_list)
    if (!(q >= 1.0)) throw ConfigError("sweep.q entries must be >= 1");
}

}  // namespace rellich
