#include "manet/scenario/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "manet/scenario/simulation.hpp"

namespace manet {

RunMetrics run_scenario(const ScenarioConfig& cfg, TraceSink* extra) {
  MetricsAccumulator acc;
  TeeTrace tee;
  tee.add(&acc);
  tee.add(extra);
  Simulation sim(cfg, &tee);
  sim.run();
  return acc.result();
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "mobility") return SweepAxis::mobility;
  if (name == "malicious") return SweepAxis::malicious;
  if (name == "volume") return SweepAxis::volume;
  throw ConfigError("unknown sweep axis '" + name + "' (expected mobility, malicious or volume)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::mobility:
      return "mobility";
    case SweepAxis::malicious:
      return "malicious";
    case SweepAxis::volume:
      return "volume";
  }
  return "?";
}

ScenarioConfig sweep_config(const ScenarioConfig& base, SweepAxis axis, double value, std::size_t repeat) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::mobility:
      cfg.max_speed = value;
      break;
    case SweepAxis::malicious:
      if (value < 0 || std::floor(value) != value) throw ConfigError("malicious sweep values must be whole counts");
      cfg.grayhole.count = static_cast<std::size_t>(value);
      cfg.grayhole.ids.clear();
      break;
    case SweepAxis::volume:
      cfg.packet_rate = value;
      break;
  }
  cfg.seed = base.seed + repeat;
  cfg.validate();
  return cfg;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepOptions& options) {
  if (options.repeats == 0) throw ConfigError("repeats must be >= 1");
  if (options.values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double v : options.values)
    for (std::size_t r = 0; r < options.repeats; ++r) rows.push_back(SweepRow{v, r, base.seed + r, {}, {}, {}});
  // Reject bad configs up front, before any thread starts.
  for (double v : options.values) sweep_config(base, options.axis, v, 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        ScenarioConfig cfg = sweep_config(base, options.axis, row.axis_value, row.repeat);
        row.metrics = run_scenario(cfg);
        if (options.baseline) {
          cfg.detection = false;
          row.baseline = run_scenario(cfg);
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::size_t threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, rows.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.axis_value != b.axis_value ? a.axis_value < b.axis_value : a.repeat < b.repeat;
  });
  return rows;
}

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::vector<SweepPoint> summarize(const std::vector<SweepRow>& rows) {
  std::map<double, std::vector<const SweepRow*>> by_value;
  for (const auto& r : rows) by_value[r.axis_value].push_back(&r);
  std::vector<SweepPoint> out;
  for (const auto& [value, group] : by_value) {
    std::vector<double> fpr, miss, pdr, ovh, pdr_b, ovh_b;
    for (const SweepRow* r : group) {
      if (!r->metrics) continue;
      fpr.push_back(r->metrics->fpr);
      miss.push_back(r->metrics->miss_rate);
      pdr.push_back(r->metrics->pdr);
      ovh.push_back(r->metrics->overhead_pct);
      if (r->baseline) {
        pdr_b.push_back(r->baseline->pdr);
        ovh_b.push_back(r->baseline->overhead_pct);
      }
    }
    out.push_back(SweepPoint{value, fpr.size(), stat_of(fpr), stat_of(miss), stat_of(pdr), stat_of(ovh),
                             stat_of(pdr_b), stat_of(ovh_b)});
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis_value,repeat,seed,fpr,miss_rate,pdr,overhead_pct,pdr_baseline,overhead_baseline_pct,convicted,truth\n";
  for (const auto& r : rows) {
    out << num(r.axis_value) << ',' << r.repeat << ',' << r.seed << ',';
    if (!r.metrics) {
      out << "nan,nan,nan,nan,nan,nan,ERROR,\n";
      continue;
    }
    const RunMetrics& m = *r.metrics;
    out << num(m.fpr) << ',' << num(m.miss_rate) << ',' << num(m.pdr) << ',' << num(m.overhead_pct) << ',';
    if (r.baseline) {
      out << num(r.baseline->pdr) << ',' << num(r.baseline->overhead_pct) << ',';
    } else {
      out << ",,";
    }
    out << join_ids(m.convicted) << ',' << join_ids(m.ground_truth) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "axis_value,runs,fpr_mean,fpr_std,miss_rate_mean,miss_rate_std,pdr_mean,pdr_std,overhead_pct_mean,"
         "overhead_pct_std,pdr_baseline_mean,pdr_baseline_std,overhead_baseline_pct_mean,overhead_baseline_pct_std\n";
  for (const auto& p : points) {
    out << num(p.axis_value) << ',' << p.runs;
    for (const Stat* s : {&p.fpr, &p.miss_rate, &p.pdr, &p.overhead_pct, &p.pdr_baseline, &p.overhead_baseline_pct})
      out << ',' << num(s->mean) << ',' << num(s->stddev);
    out << '\n';
  }
}

void write_meta(std::ostream& out, const ScenarioConfig& base, const SweepOptions& options,
                const std::vector<SweepRow>& rows) {
  out << "axis=" << to_string(options.axis) << "\n";
  out << "repeats=" << options.repeats << "\n";
  out << "baseline=" << (options.baseline ? "detection_off_same_seed" : "none") << "\n";
  out << "seed_rule=base_seed+repeat\n";
  out << "fpr=|convicted \\ truth| / honest_nodes\n";
  out << "miss_rate=|truth \\ convicted| / |truth| (0 when truth is empty)\n";
  out << "pdr=received / originated (CBR only)\n";
  out << "overhead_pct=100 * control transmissions / CBR data transmissions (per hop)\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) ++failed;
    if (r.metrics)
      out << "denominators value=" << num(r.axis_value) << " repeat=" << r.repeat
          << " honest_nodes=" << r.metrics->honest_nodes << " adversaries=" << r.metrics->ground_truth.size()
          << " originated=" << r.metrics->originated << " data_packets=" << r.metrics->data_packets << "\n";
    else
      out << "failure value=" << num(r.axis_value) << " repeat=" << r.repeat << " error=" << r.error << "\n";
  }
  out << "failed_runs=" << failed << "\n";
  out << "# base configuration\n" << render_config(base);
}

}  // namespace manet
