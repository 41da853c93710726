#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "manet/sim/types.hpp"

namespace manet {

struct RouteEntry {
  NodeId destination;
  NodeId next_hop;
  std::uint32_t hop_count = 0;
  std::uint32_t dest_seq = 0;
  SimTime expires_at;
  bool valid = true;
};

/// Per-node AODV routing table. A fresher destination sequence number always
/// wins; at equal freshness the shorter path wins.
class RouteTable {
 public:
  std::optional<RouteEntry> lookup(NodeId destination, SimTime now) const;

  /// Installs or updates the route. Returns true when the table changed its
  /// next hop, hop count or sequence number for the destination.
  bool offer(const RouteEntry& candidate, SimTime now);

  void refresh(NodeId destination, SimTime expires_at);
  void invalidate(NodeId destination);
  /// Sequence number a route request must ask for: strictly newer than any
  /// route this node can no longer use.
  std::uint32_t request_seq(NodeId destination, SimTime now) const;
  /// Invalidates every route through or towards `node`.
  void purge(NodeId node);

  /// Last sequence number heard for the destination, valid or not.
  std::uint32_t known_seq(NodeId destination) const;

  const std::map<NodeId, RouteEntry>& entries() const { return entries_; }

 private:
  std::map<NodeId, RouteEntry> entries_;
};

}  // namespace manet
