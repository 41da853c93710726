#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "manet/proto/messages.hpp"
#include "manet/sim/engine.hpp"
#include "manet/sim/mobility.hpp"
#include "manet/sim/rng.hpp"
#include "manet/sim/trace.hpp"

namespace manet {

/// Abstract stand-in for PHY and MAC: a disc radio, independent per-transmission
/// loss, a finite receive buffer per node and a fixed per-hop latency.
struct LinkModel {
  double range = 200.0;
  double base_loss_prob = 0.01;
  /// Packets in flight towards one receiver. nullopt means unbounded.
  std::optional<std::size_t> buffer_capacity = 50;
  SimTime per_hop_latency = SimTime::from_millis(2);
};

enum class DeliveryOutcome : std::uint8_t { delivered, lost_channel, dropped_buffer, out_of_range };

Outcome to_outcome(DeliveryOutcome outcome);

/// Node registry, radio channel and clock shared by all nodes of one run.
class Network {
 public:
  /// Called when a message arrives: (receiver, link-level sender, message).
  using Receiver = std::function<void(NodeId, NodeId, const Message&)>;
  /// Called for every transmission attempt: (sender, receiver, granted).
  using LinkObserver = std::function<void(NodeId, NodeId, bool)>;

  Network(LinkModel link, std::uint64_t seed, TraceSink* trace);

  Engine& engine() { return engine_; }
  SimTime now() const { return engine_.now(); }
  const LinkModel& link() const { return link_; }

  /// Throws ConfigError for id 0 or a duplicate id.
  void add_node(NodeId id, Trajectory trajectory);
  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  std::vector<NodeId> node_ids() const;

  void set_receiver(Receiver receiver) { receiver_ = std::move(receiver); }
  void set_link_observer(LinkObserver observer) { observer_ = std::move(observer); }

  Position position(NodeId id);
  double distance(NodeId a, NodeId b);
  bool in_range(NodeId a, NodeId b);

  /// Nodes within radio range at the current clock, ascending by id.
  std::vector<NodeId> neighbors(NodeId id);

  /// Unicast one message over one hop. Every call yields exactly one link
  /// record in the trace: failures immediately, deliveries at arrival time.
  DeliveryOutcome transmit(NodeId src, NodeId dst, const Message& msg);

  void trace(const TraceRecord& record) {
    if (trace_ != nullptr) trace_->record(record);
  }

  std::uint64_t transmissions() const { return transmissions_; }

 private:
  struct Slot {
    Trajectory trajectory;
    std::size_t in_flight = 0;
    SimTime cached_at = SimTime::from_nanos(-1);
    Position cached;
  };
  Slot& slot(NodeId id);

  LinkModel link_;
  Engine engine_;
  RngStream loss_rng_;
  TraceSink* trace_;
  std::map<NodeId, Slot> nodes_;
  Receiver receiver_;
  LinkObserver observer_;
  std::uint64_t transmissions_ = 0;
};

}  // namespace manet
