#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "manet/adversary/grayhole.hpp"
#include "manet/alarm/alarm_agent.hpp"
#include "manet/detection/detector.hpp"
#include "manet/detection/invocation.hpp"
#include "manet/routing/aodv.hpp"
#include "manet/sim/mobility.hpp"
#include "manet/sim/network.hpp"

namespace manet {

struct GrayHoleConfig {
  std::size_t count = 0;
  double p_gb = 0.2;
  double p_bg = 0.2;
  double min_rate = 0.2;
  double max_rate = 1.0;
  double phase_tick_s = 5.0;
  Phase initial_phase = Phase::good;
  std::optional<std::set<NodeId>> victims;
  bool collude = false;
  bool sync_evasion = false;
  double evasion_window_s = 2.0;
  /// Explicit adversary ids; drawn at random when empty.
  std::vector<NodeId> ids;
  std::optional<NodeId> badmouth_target;
};

struct DetectConfig {
  InvocationPolicy invocation;
  /// Fixed period in seconds; overrides the invocation policy when set.
  std::optional<double> period_s;
  double threshold_s = 10.0;
  bool churn_scaling = true;
  double epoch_length_s = 30.0;
  double rrep_wait_s = 0.06;
  double probe_slack_s = 0.1;
  double query_timeout_s = 0.06;
  double probe_gap_s = 0.05;
  double coop_window_s = 1.0;
  std::uint32_t coop_scope = 2;
  ThroughRule through_rule = ThroughRule::final_hop;
  std::uint32_t alarm_hops = 2;
  bool corroborate = true;
};

struct FlowSpec {
  NodeId src;
  NodeId dst;
};

/// Every scenario input. Defaults reproduce the reference parameter table.
struct ScenarioConfig {
  std::size_t nodes = 50;
  Area area{2000.0, 600.0};
  double duration_s = 1500.0;
  double range = 200.0;
  double max_speed = 20.0;
  double pause_s = 0.0;
  std::size_t flows = 20;
  double packet_rate = 2.0;
  std::uint32_t payload = 512;
  double flow_start_max_s = 10.0;
  /// Traffic stops this long before the end so in-flight packets settle.
  double drain_s = 5.0;
  std::uint64_t seed = 1;
  bool detection = true;
  std::size_t k = 3;
  PropagationMode propagate = PropagationMode::piggyback;
  double base_loss_prob = 0.01;
  std::optional<std::size_t> buffer_capacity = 50;
  double per_hop_latency_s = 0.002;
  double discovery_timeout_s = 1.0;
  double route_lifetime_s = 10.0;
  std::size_t pending_capacity = 10;
  std::size_t max_malicious = 10;
  GrayHoleConfig grayhole;
  DetectConfig detect;
  /// Fixed node positions (static network). Must cover ids 1..nodes.
  std::map<NodeId, Position> positions;
  /// Explicit flows; drawn among honest nodes when empty.
  std::vector<FlowSpec> flow_pairs;

  /// Detection period derived from the invocation policy or the override.
  SimTime detection_period() const;
  /// Throws ConfigError listing every problem found.
  void validate() const;
};

/// Applies one `key=value` assignment. Throws ConfigError for unknown keys or
/// unparsable values.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat `key=value` text. `#` starts a comment. Validates the result.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical `key=value` rendering of every setting, one per line.
std::string render_config(const ScenarioConfig& cfg);

}  // namespace manet
