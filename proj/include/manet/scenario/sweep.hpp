#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manet/scenario/config.hpp"
#include "manet/scenario/metrics.hpp"

namespace manet {

class TraceSink;

/// Runs one scenario to completion. `extra` also receives every record.
RunMetrics run_scenario(const ScenarioConfig& cfg, TraceSink* extra = nullptr);

enum class SweepAxis { mobility, malicious, volume };

/// Throws ConfigError for unknown names.
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepOptions {
  SweepAxis axis = SweepAxis::mobility;
  std::vector<double> values;
  std::size_t repeats = 10;
  /// Also run every point with detection off under the same seed.
  bool baseline = true;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

struct SweepRow {
  double axis_value = 0.0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::optional<RunMetrics> metrics;
  std::optional<RunMetrics> baseline;
  std::string error;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one sample
};

struct SweepPoint {
  double axis_value = 0.0;
  std::size_t runs = 0;
  Stat fpr, miss_rate, pdr, overhead_pct, pdr_baseline, overhead_baseline_pct;
};

/// Config for one sweep point: the axis value applied, seed = base seed + repeat.
ScenarioConfig sweep_config(const ScenarioConfig& base, SweepAxis axis, double value, std::size_t repeat);

/// Rows sorted by (axis_value, repeat) whatever order the runs finish in.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepOptions& options);
std::vector<SweepPoint> summarize(const std::vector<SweepRow>& rows);

Stat stat_of(const std::vector<double>& xs);

/// `axis_value,repeat,seed,fpr,miss_rate,pdr,overhead_pct,pdr_baseline,overhead_baseline_pct,convicted,truth`
void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SweepPoint>& points);
/// Metric definitions and denominators, so the CSV stays a plain table.
void write_meta(std::ostream& out, const ScenarioConfig& base, const SweepOptions& options,
                const std::vector<SweepRow>& rows);

}  // namespace manet
