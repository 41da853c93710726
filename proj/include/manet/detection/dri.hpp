#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "manet/sim/types.hpp"

namespace manet {

/// One row of the Data Routing Information table.
struct DriEntry {
  NodeId neighbor;
  std::uint8_t from_bit = 0;     // owner forwarded data that arrived from this neighbor
  std::uint8_t through_bit = 0;  // owner handed data to this neighbor
  std::uint32_t rts_count = 0;
  std::uint32_t cts_count = 0;
  std::uint8_t check_bit = 0;    // cleared by a probe this epoch
  SimTime last_interaction;
  // Adjacency bookkeeping, sampled periodically.
  bool adjacent = false;
  SimTime adjacent_since;
  SimTime last_seen;

  /// RTS/CTS shown as a quotient; 0 when no CTS was ever granted.
  double rts_cts_ratio() const { return cts_count == 0 ? 0.0 : static_cast<double>(rts_count) / cts_count; }
  int interaction_score() const { return from_bit + through_bit; }
};

/// Which forwards set the Through bit.
enum class ThroughRule : std::uint8_t {
  /// Every forward to the next hop.
  any_forward,
  /// Only hand-offs to the packet's final destination. Handing a packet to a
  /// relay proves nothing about the relay without overhearing it.
  final_hop,
};

class DriTable {
 public:
  explicit DriTable(NodeId owner, SimTime epoch_started = {}) : owner_(owner), epoch_started_(epoch_started) {}

  NodeId owner() const { return owner_; }
  SimTime epoch_started() const { return epoch_started_; }
  const std::map<NodeId, DriEntry>& entries() const { return entries_; }
  const DriEntry* find(NodeId neighbor) const;

  /// Creates the row if missing. The owner never gets a row.
  DriEntry& upsert(NodeId neighbor);

  void mark_from(NodeId neighbor, SimTime now);
  void mark_through(NodeId neighbor, SimTime now);
  void set_check_bit(NodeId neighbor);
  void count_attempt(NodeId neighbor, bool granted);

  /// Updates adjacency from the current neighbor set. Rows for neighbors that
  /// have been away longer than `forget_after` are dropped, which resets
  /// their evidence. Returns the number of arrivals plus departures.
  std::size_t observe_presence(const std::vector<NodeId>& neighbors, SimTime now, SimTime forget_after);

  /// Starts a new evidence epoch: every bit returns to 0.
  void roll_epoch(SimTime now);

 private:
  NodeId owner_;
  SimTime epoch_started_;
  std::map<NodeId, DriEntry> entries_;
};

/// Records that the owner relayed a data packet from `prev_hop` to `next_hop`.
void dri_observe_forward(DriTable& table, NodeId prev_hop, NodeId next_hop, NodeId final_destination, SimTime now,
                         ThroughRule rule = ThroughRule::final_hop);

/// Neighbors the owner has not exchanged data with and has not cleared, in
/// ascending id order. Only neighbors adjacent for at least the threshold
/// interval qualify, and nothing qualifies before the epoch is that old.
std::vector<NodeId> scan_suspects(const DriTable& table, SimTime threshold_interval, SimTime now);

/// Most reliable current neighbor other than the suspect: highest From+Through,
/// then most recent interaction, then lowest id. When no neighbor has any
/// recorded interaction, the longest-adjacent one (lowest id on ties). None
/// only when the suspect is the sole neighbor.
std::optional<NodeId> select_cooperative_node(const DriTable& table, NodeId suspect);

}  // namespace manet
