// Command-line front end: single runs, parameter sweeps and offline metrics.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "manet/scenario/metrics.hpp"
#include "manet/scenario/simulation.hpp"
#include "manet/scenario/sweep.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

ScenarioConfig read_config(const std::string& path, const std::vector<std::string>& overrides) {
  ScenarioConfig cfg = path.empty() ? ScenarioConfig{} : load_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--values: not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

int cmd_run(const std::string& config, const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
  ScenarioConfig cfg = read_config(config, overrides);
  if (seed) cfg.seed = *seed;
  fs::create_directories(out_dir);
  std::ofstream trace_file = open_out(fs::path(out_dir) / "trace.txt");
  TextTraceWriter writer(trace_file);
  const RunMetrics m = run_scenario(cfg, &writer);
  trace_file.close();
  const std::string text = format_metrics(m);
  open_out(fs::path(out_dir) / "metrics.txt") << text;
  open_out(fs::path(out_dir) / "config.txt") << render_config(cfg);
  std::cout << text;
  return 0;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& overrides, const std::string& axis,
              const std::string& values, std::size_t repeats, bool no_baseline, std::size_t threads,
              const std::string& out_dir) {
  const ScenarioConfig base = read_config(config, overrides);
  SweepOptions opt;
  opt.axis = parse_axis(axis);
  opt.values = parse_values(values);
  opt.repeats = repeats;
  opt.baseline = !no_baseline;
  opt.threads = threads;
  if (repeats == 0) throw ConfigError("--repeats must be >= 1");
  fs::create_directories(out_dir);
  const auto rows = run_sweep(base, opt);
  const fs::path dir(out_dir);
  auto rows_out = open_out(dir / ("sweep_" + axis + ".csv"));
  write_rows_csv(rows_out, rows);
  auto summary_out = open_out(dir / ("sweep_" + axis + "_summary.csv"));
  write_summary_csv(summary_out, summarize(rows));
  auto meta_out = open_out(dir / ("sweep_" + axis + "_meta.txt"));
  write_meta(meta_out, base, opt, rows);
  write_summary_csv(std::cout, summarize(rows));
  for (const auto& r : rows)
    if (!r.error.empty()) return kRuntimeError;
  return 0;
}

int cmd_metrics(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot read " + trace_path);
  std::cout << format_metrics(compute_metrics(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gray-hole detection simulator for mobile ad hoc networks"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";

  auto* run = app.add_subcommand("run", "Run one scenario and write trace.txt, metrics.txt, config.txt");
  run->add_option("--config", config, "key=value scenario file (defaults when omitted)");
  run->add_option("--set", overrides, "Override one key, e.g. --set max_speed=0");
  run->add_option("--seed", seed, "Seed override");
  run->add_option("--out", out_dir, "Output directory");

  std::string axis, values, trace_path;
  std::size_t repeats = 10, threads = 0;
  bool no_baseline = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep one axis and write CSV tables");
  sweep->add_option("--config", config, "key=value scenario file");
  sweep->add_option("--set", overrides, "Override one key");
  sweep->add_option("--axis", axis, "mobility | malicious | volume")->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();
  sweep->add_option("--repeats", repeats, "Seeds per value");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_flag("--no-baseline", no_baseline, "Skip the detection-off runs");
  sweep->add_option("--out", out_dir, "Output directory");

  auto* metrics = app.add_subcommand("metrics", "Compute metrics from a trace file");
  metrics->add_option("--trace", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, overrides, seed, out_dir);
    if (*sweep) return cmd_sweep(config, overrides, axis, values, repeats, no_baseline, threads, out_dir);
    if (*metrics) return cmd_metrics(trace_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
