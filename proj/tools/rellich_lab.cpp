// Command-line driver: one subcommand per experiment, plus `suite` and `plot`.
// Exit codes: 0 all asserted checks pass, 1 an assertion failed or a
// computation raised, 2 configuration error.

#include "rellich/rellich.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

struct Flags {
  std::string config;
  std::optional<std::string> seed, out, threads, dimension, coupling, times, p, q, lambda, distances, cells, per_axis,
      radius, half_width, spacing, ell_max, samples;
  bool allow_supercritical = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "config file (key = value with [section] headers)");
  app->add_option("--seed", f.seed, "global seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--threads", f.threads, "worker threads for parameter sweeps");
  app->add_flag("--allow-supercritical", f.allow_supercritical, "permit c >= C* (report only, no assertions)");
  app->add_option("--N", f.dimension, "dimension N >= 5");
  app->add_option("--c", f.coupling, "coupling list, comma separated");
  app->add_option("--t", f.times, "time list");
  app->add_option("--p", f.p, "p list");
  app->add_option("--q", f.q, "q list (inf allowed)");
  app->add_option("--lambda", f.lambda, "twist strength list");
  app->add_option("--d", f.distances, "outer region start list");
  app->add_option("--n", f.cells, "radial cell counts");
  app->add_option("--m", f.per_axis, "box nodes per axis");
  app->add_option("--R", f.radius, "radial outer radius");
  app->add_option("--a", f.half_width, "box half width");
  app->add_option("--spacing", f.spacing, "radial spacing: uniform or log");
  app->add_option("--ell-max", f.ell_max, "largest angular sector");
  app->add_option("--samples", f.samples, "sample count");
}

// Config file entries first, then flags, so flags win.
Settings collect_settings(const Flags& f) {
  Settings s;
  if (!f.config.empty()) {
    std::string text;
    try {
      text = rellich::read_file(f.config);
    } catch (const rellich::Error& e) {
      throw rellich::ConfigError(e.what());
    }
    s = rellich::parse_config_text(text);
  }
  auto add = [&](const std::optional<std::string>& v, const char* key) {
    if (v) s.emplace_back(key, *v);
  };
  add(f.seed, "run.seed");
  add(f.out, "run.out");
  add(f.threads, "run.threads");
  add(f.dimension, "model.N");
  add(f.coupling, "model.c");
  add(f.times, "sweep.t");
  add(f.p, "sweep.p");
  add(f.q, "sweep.q");
  add(f.lambda, "sweep.lambda");
  add(f.distances, "sweep.d");
  add(f.cells, "grid.n");
  add(f.per_axis, "grid.m");
  add(f.radius, "grid.R");
  add(f.half_width, "grid.half_width");
  add(f.spacing, "grid.spacing");
  add(f.ell_max, "sweep.ell_max");
  add(f.samples, "sweep.samples");
  if (f.allow_supercritical) s.emplace_back("run.allow_supercritical", "true");
  return s;
}

void report(const rellich::ExperimentOutput& out) {
  for (const auto& c : out.checks) {
    const char* status = c.passed ? "PASS" : (c.asserted ? "FAIL" : "NOTE");
    std::cout << status << ' ' << out.experiment << ": " << c.name << ": " << c.detail << '\n';
  }
}

int run_single(const std::string& name, const Flags& flags) {
  const rellich::RunConfig cfg = rellich::make_config(name, collect_settings(flags));
  const rellich::ExperimentOutput out = rellich::run_experiment(cfg);
  const auto manifest = rellich::write_experiment(out, cfg.out);
  report(out);
  std::cout << "manifest: " << manifest.string() << '\n';
  return out.passed() ? 0 : 1;
}

int run_suite(const Flags& flags) {
  const Settings settings = collect_settings(flags);
  std::vector<rellich::RunConfig> configs;
  for (const auto& name : rellich::experiment_names()) configs.push_back(rellich::make_config(name, settings));
  const std::filesystem::path root = configs.front().out;
  rellich::Json entries = rellich::Json::array();
  bool passed = true;
  double seconds = 0.0;
  for (const auto& cfg : configs) {
    const rellich::ExperimentOutput out = rellich::run_experiment(cfg);
    const auto manifest = rellich::write_experiment(out, root);
    report(out);
    passed = passed && out.passed();
    seconds += out.wall_seconds;
    entries.push_back({{"experiment", out.experiment},
                       {"manifest", std::filesystem::relative(manifest, root).generic_string()},
                       {"passed", out.passed()}});
  }
  const rellich::Json suite = {{"experiment", "suite"},
                               {"seed", configs.front().seed},
                               {"threads", configs.front().threads},
                               {"passed", passed},
                               {"wall_clock_seconds", seconds},
                               {"artifacts", entries}};
  rellich::write_atomic(root / "manifest.json", suite.dump(2) + "\n");
  std::cout << "suite " << (passed ? "passed" : "failed") << "; manifest: " << (root / "manifest.json").string() << '\n';
  return passed ? 0 : 1;
}

struct PlotFlags {
  std::string csv, output, x, title;
  std::vector<std::string> y;
  std::vector<double> guides;
  bool linear_x = false, linear_y = false;
};

int run_plot(const PlotFlags& f) {
  std::string text;
  try {
    text = rellich::read_file(f.csv);
  } catch (const rellich::Error& e) {
    throw rellich::ConfigError(e.what());
  }
  const rellich::CsvData data = rellich::parse_csv(text);
  for (const auto& name : f.y)
    if (data.column(name) < 0) throw rellich::ConfigError("plot: missing column '" + name + "' in " + f.csv);
  if (data.column(f.x) < 0) throw rellich::ConfigError("plot: missing column '" + f.x + "' in " + f.csv);
  rellich::PlotSpec spec;
  spec.title = f.title.empty() ? std::filesystem::path(f.csv).stem().string() : f.title;
  spec.x_column = f.x;
  spec.y_columns = f.y;
  spec.log_x = !f.linear_x;
  spec.log_y = !f.linear_y;
  spec.guide_slopes = f.guides;
  const std::string output = f.output.empty() ? std::filesystem::path(f.csv).replace_extension(".svg").string() : f.output;
  rellich::write_atomic(output, rellich::render_svg(data, spec));
  std::cout << "wrote " << output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the fourth-order operator A = Delta^2 - c |x|^-4 on R^N, N >= 5"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> experiments;
  for (const auto& name : rellich::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_flags(sub, flags);
    experiments.emplace_back(name, sub);
  }
  CLI::App* suite = app.add_subcommand("suite", "run every experiment");
  add_flags(suite, flags);

  PlotFlags plot_flags;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV as SVG");
  plot->add_option("csv", plot_flags.csv, "input CSV")->required();
  plot->add_option("--x", plot_flags.x, "x column")->required();
  plot->add_option("--y", plot_flags.y, "y columns")->required();
  plot->add_option("--guide", plot_flags.guides, "reference slopes");
  plot->add_option("--out", plot_flags.output, "output SVG (default: CSV path with .svg)");
  plot->add_option("--title", plot_flags.title, "plot title");
  plot->add_flag("--linear-x", plot_flags.linear_x, "linear x axis");
  plot->add_flag("--linear-y", plot_flags.linear_y, "linear y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (suite->parsed()) return run_suite(flags);
    if (plot->parsed()) return run_plot(plot_flags);
    for (const auto& [name, sub] : experiments)
      if (sub->parsed()) return run_single(name, flags);
  } catch (const rellich::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
