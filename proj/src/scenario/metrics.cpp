#include "manet/scenario/metrics.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace manet {

void MetricsAccumulator::record(const TraceRecord& r) {
  last_ = r.t;
  if (is_link_outcome(r.outcome)) {
    if (r.kind == PacketKind::data) {
      ++m_.data_packets;
    } else if (is_control(r.kind)) {
      ++m_.control_packets;
    }
    return;
  }
  switch (r.outcome) {
    case Outcome::originated:
      if (r.kind == PacketKind::data) ++m_.originated;
      break;
    case Outcome::received:
      if (r.kind == PacketKind::data) ++m_.delivered;
      break;
    case Outcome::malicious_drop:
      if (r.kind == PacketKind::data) ++m_.malicious_drops;
      break;
    case Outcome::commit:
      m_.convicted.insert(NodeId(r.dst));
      break;
    case Outcome::honest:
      ++m_.honest_nodes;
      break;
    case Outcome::adversary:
      m_.ground_truth.insert(NodeId(r.src));
      break;
    case Outcome::complete:
      complete_ = true;
      break;
    default:
      break;
  }
}

RunMetrics MetricsAccumulator::result() const {
  RunMetrics m = m_;
  std::size_t false_pos = 0;
  for (NodeId id : m.convicted)
    if (m.ground_truth.count(id) == 0) ++false_pos;
  std::size_t missed = 0;
  for (NodeId id : m.ground_truth)
    if (m.convicted.count(id) == 0) ++missed;
  m.fpr = m.honest_nodes == 0 ? 0.0 : static_cast<double>(false_pos) / static_cast<double>(m.honest_nodes);
  m.miss_rate = m.ground_truth.empty() ? 0.0 : static_cast<double>(missed) / static_cast<double>(m.ground_truth.size());
  m.pdr = m.originated == 0 ? 0.0 : static_cast<double>(m.delivered) / static_cast<double>(m.originated);
  m.overhead_pct =
      m.data_packets == 0 ? 0.0 : 100.0 * static_cast<double>(m.control_packets) / static_cast<double>(m.data_packets);
  return m;
}

RunMetrics compute_metrics(std::istream& trace) {
  MetricsAccumulator acc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(trace, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (acc.complete()) throw TraceTruncated("records after the end record at line " + std::to_string(lineno), acc.last_time());
    TraceRecord rec;
    try {
      rec = parse_record(line);
    } catch (const std::invalid_argument& e) {
      throw TraceTruncated("malformed record at line " + std::to_string(lineno) + ": " + e.what(), acc.last_time());
    }
    acc.record(rec);
  }
  if (!acc.complete()) throw TraceTruncated("trace has no end record", acc.last_time());
  return acc.result();
}

RunMetrics compute_metrics(const std::vector<TraceRecord>& trace) {
  MetricsAccumulator acc;
  for (const auto& r : trace) acc.record(r);
  if (!acc.complete()) throw TraceTruncated("trace has no end record", acc.last_time());
  return acc.result();
}

std::string join_ids(const std::set<NodeId>& ids) {
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ';';
    out += to_string(id);
  }
  return out;
}

std::string format_metrics(const RunMetrics& m) {
  std::ostringstream out;
  out.precision(17);
  out << "fpr=" << m.fpr << "\n"
      << "miss_rate=" << m.miss_rate << "\n"
      << "pdr=" << m.pdr << "\n"
      << "overhead_pct=" << m.overhead_pct << "\n"
      << "originated=" << m.originated << "\n"
      << "delivered=" << m.delivered << "\n"
      << "malicious_drops=" << m.malicious_drops << "\n"
      << "control_packets=" << m.control_packets << "\n"
      << "data_packets=" << m.data_packets << "\n"
      << "honest_nodes=" << m.honest_nodes << "\n"
      << "convicted=" << join_ids(m.convicted) << "\n"
      << "truth=" << join_ids(m.ground_truth) << "\n";
  return out.str();
}

}  // namespace manet
