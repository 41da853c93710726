#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "manet/proto/messages.hpp"
#include "manet/routing/route_table.hpp"
#include "manet/sim/network.hpp"

namespace manet {

struct RoutingParams {
  SimTime discovery_timeout = SimTime::from_seconds_int(1);
  std::size_t pending_capacity = 10;
  SimTime route_lifetime = SimTime::from_seconds_int(10);
  std::uint8_t data_ttl = 32;
  std::uint8_t rreq_ttl = 32;
};

/// Minimal AODV: RREQ flooding with reverse-route learning, RREP return along
/// the reverse path, and hop-by-hop data forwarding with a bounded pending
/// buffer while a discovery is outstanding. Nodes know their current one-hop
/// neighbors (the link layer's beaconing is abstracted away), so data for a
/// neighbor is always sent directly.
class AodvAgent {
 public:
  struct Hooks {
    /// A data packet was handed to `next`. `prev` is empty when this node
    /// originated it.
    std::function<void(std::optional<NodeId> prev, NodeId next, const DataPacket&)> on_forward;
    /// A data packet reached its destination at this node.
    std::function<void(NodeId prev, const DataPacket&)> on_deliver;
    /// Adversary decision for data transiting this node. True drops it.
    std::function<bool(NodeId prev, const DataPacket&)> drop_transit;
    /// Adversary override for RREQ handling: a reply to send instead of the
    /// honest behavior.
    std::function<std::optional<Rrep>(const Rreq&)> fabricate_reply;
    std::function<bool(NodeId)> is_isolated;
    std::function<std::optional<FaultyListDigest>()> piggyback_out;
    std::function<void(const FaultyListDigest&)> piggyback_in;
    /// RREPs answering a detection route query (probe_nonce set).
    std::function<void(NodeId from, const Rrep&)> on_probe_rrep;
  };

  AodvAgent(NodeId self, Network& net, RoutingParams params, Hooks hooks);

  NodeId self() const { return self_; }
  const RouteTable& routes() const { return routes_; }
  const RoutingParams& params() const { return params_; }

  /// Sends a packet originated at this node. Honors forced_next_hop.
  void send_data(DataPacket pkt);

  void receive(NodeId from, const Message& msg);

  void originate_rreq(NodeId target);
  void handle_rreq(NodeId from, const Rreq& msg);
  void handle_rrep(NodeId from, const Rrep& msg);
  void forward_data(NodeId from, DataPacket pkt);

  /// Single-hop route query used by the detection protocol. `to` empty means
  /// all current neighbors except `exclude`.
  void send_route_query(std::optional<NodeId> to, NodeId target, std::uint64_t nonce);

  /// Next hop this node would use for `destination` right now, if any.
  std::optional<NodeId> next_hop(NodeId destination);

  /// Drops every route and pending packet involving a convicted node.
  void isolate(NodeId node);

  bool discovery_pending(NodeId target) const { return discoveries_.count(target) != 0; }
  std::size_t pending_packets() const { return pending_.size(); }
  std::uint32_t own_seq() const { return own_seq_; }
  std::uint64_t rreqs_originated() const { return rreqs_originated_; }
  std::uint64_t rreqs_rebroadcast() const { return rreqs_rebroadcast_; }

 private:
  bool isolated(NodeId id) const { return hooks_.is_isolated && hooks_.is_isolated(id); }
  std::optional<FaultyListDigest> piggyback() const;
  void route_and_send(DataPacket pkt, std::optional<NodeId> prev);
  void enqueue(DataPacket pkt);
  void flush_pending(NodeId destination);
  void discovery_timeout(NodeId target, std::uint64_t generation);
  void install(NodeId destination, NodeId next_hop, std::uint32_t hops, std::uint32_t seq);
  void trace_drop(const DataPacket& pkt, Outcome outcome);
  void broadcast(const Message& msg);

  NodeId self_;
  Network& net_;
  RoutingParams params_;
  Hooks hooks_;
  RouteTable routes_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t broadcast_id_ = 0;
  std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs_;
  std::deque<DataPacket> pending_;
  std::map<NodeId, std::uint64_t> discoveries_;  // target -> generation
  std::uint64_t discovery_generation_ = 0;
  std::uint64_t rreqs_originated_ = 0;
  std::uint64_t rreqs_rebroadcast_ = 0;
};

}  // namespace manet
