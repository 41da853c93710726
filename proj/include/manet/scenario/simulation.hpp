#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "manet/adversary/grayhole.hpp"
#include "manet/alarm/alarm_agent.hpp"
#include "manet/detection/detector.hpp"
#include "manet/routing/aodv.hpp"
#include "manet/scenario/config.hpp"
#include "manet/sim/network.hpp"

namespace manet {

/// Everything one simulated node runs.
struct NodeAgents {
  NodeId id;
  bool adversary = false;
  std::unique_ptr<AodvAgent> routing;
  std::unique_ptr<Detector> detector;
  std::unique_ptr<AlarmAgent> alarm;
  std::unique_ptr<GrayHoleAgent> grayhole;
};

/// One assembled run: network, nodes, adversaries and CBR traffic.
class Simulation {
 public:
  /// Validates `cfg`; throws ConfigError when it is unusable.
  Simulation(ScenarioConfig cfg, TraceSink* trace);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  Network& network() { return net_; }
  NodeAgents& node(NodeId id) { return *nodes_.at(id.value() - 1); }
  const std::vector<NodeId>& adversaries() const { return adversaries_; }
  const std::vector<FlowSpec>& flows() const { return flows_; }
  SimTime detection_period() const { return period_; }
  SimTime end_time() const { return SimTime::from_seconds(cfg_.duration_s); }

  /// Sees every round result of every node, after the node handled it.
  void set_round_observer(std::function<void(const RoundResult&)> observer) { observer_ = std::move(observer); }

  /// Advances the clock without closing the trace.
  void run_until(SimTime t);
  /// Runs to the configured duration and writes the end-of-trace record.
  void run();

 private:
  void build_nodes();
  void pick_adversaries();
  void pick_flows();
  void start_flow(std::size_t index, SimTime at);
  void send_cbr(std::size_t index, std::uint32_t seq);
  void deliver(NodeId receiver, NodeId from, const Message& msg);

  ScenarioConfig cfg_;
  TraceSink* trace_;
  Network net_;
  SimTime period_;
  SimTime traffic_end_;
  std::unique_ptr<SignatureScheme> scheme_;
  std::vector<std::unique_ptr<NodeAgents>> nodes_;
  std::vector<NodeId> adversaries_;
  std::vector<FlowSpec> flows_;
  std::function<void(const RoundResult&)> observer_;
  bool finished_ = false;
};

}  // namespace manet
