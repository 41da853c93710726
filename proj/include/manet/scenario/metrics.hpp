#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/sim/trace.hpp"

namespace manet {

struct RunMetrics {
  double fpr = 0.0;
  double miss_rate = 0.0;
  double pdr = 0.0;
  double overhead_pct = 0.0;
  std::set<NodeId> convicted;
  std::set<NodeId> ground_truth;
  std::size_t honest_nodes = 0;
  std::uint64_t originated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t control_packets = 0;
  std::uint64_t data_packets = 0;
  std::uint64_t malicious_drops = 0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Raised when a trace ends without its end record or contains a bad line.
class TraceTruncated : public std::runtime_error {
 public:
  TraceTruncated(const std::string& what, SimTime last_valid)
      : std::runtime_error(what + " (last valid timestamp " + format_time(last_valid) + ")"), last_valid_(last_valid) {}
  SimTime last_valid() const { return last_valid_; }

 private:
  SimTime last_valid_;
};

/// Folds trace records into metrics as they are produced.
///
/// fpr        = |convicted \ truth| / |honest|
/// miss_rate  = |truth \ convicted| / |truth|, 0 without adversaries
/// pdr        = received / originated, 0 without traffic
/// overhead   = 100 * control transmissions / data transmissions
///
/// Transmissions are link records (one per hop attempt). Convicted nodes are
/// those committed to at least one node's faulty list.
class MetricsAccumulator final : public TraceSink {
 public:
  void record(const TraceRecord& record) override;

  bool complete() const { return complete_; }
  SimTime last_time() const { return last_; }
  RunMetrics result() const;

 private:
  RunMetrics m_;
  bool complete_ = false;
  SimTime last_;
};

/// Reads a text trace. Throws TraceTruncated on a malformed line or a
/// missing end record.
RunMetrics compute_metrics(std::istream& trace);
RunMetrics compute_metrics(const std::vector<TraceRecord>& trace);

/// `key=value` lines: fpr, miss_rate, pdr, overhead_pct, counts and id sets.
std::string format_metrics(const RunMetrics& m);
/// `a;b;c`
std::string join_ids(const std::set<NodeId>& ids);

}  // namespace manet
