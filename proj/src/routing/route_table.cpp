#include "manet/routing/route_table.hpp"

namespace manet {

std::optional<RouteEntry> RouteTable::lookup(NodeId destination, SimTime now) const {
  auto it = entries_.find(destination);
  if (it == entries_.end() || !it->second.valid || it->second.expires_at <= now) return std::nullopt;
  return it->second;
}

bool RouteTable::offer(const RouteEntry& candidate, SimTime now) {
  auto it = entries_.find(candidate.destination);
  if (it == entries_.end()) {
    entries_.emplace(candidate.destination, candidate);
    return true;
  }
  RouteEntry& cur = it->second;
  const bool usable = cur.valid && cur.expires_at > now;
  const bool fresher = candidate.dest_seq > cur.dest_seq;
  const bool shorter = candidate.dest_seq == cur.dest_seq && candidate.hop_count < cur.hop_count;
  // A broken route only yields to news at least as fresh as the bumped number.
  const bool replaces_dead = !usable && (cur.valid || candidate.dest_seq >= cur.dest_seq);
  if (replaces_dead || fresher || shorter) {
    const bool changed = !usable || cur.next_hop != candidate.next_hop || cur.hop_count != candidate.hop_count ||
                         cur.dest_seq != candidate.dest_seq;
    cur = candidate;
    return changed;
  }
  if (candidate.dest_seq == cur.dest_seq && candidate.hop_count == cur.hop_count &&
      candidate.next_hop == cur.next_hop && candidate.expires_at > cur.expires_at) {
    cur.expires_at = candidate.expires_at;
  }
  return false;
}

void RouteTable::refresh(NodeId destination, SimTime expires_at) {
  auto it = entries_.find(destination);
  if (it != entries_.end() && it->second.valid && it->second.expires_at < expires_at) it->second.expires_at = expires_at;
}

void RouteTable::invalidate(NodeId destination) {
  auto it = entries_.find(destination);
  if (it == entries_.end() || !it->second.valid) return;
  it->second.valid = false;
  // Bumping the number keeps holders of the same stale route from answering
  // the repair request, which is what would close a loop.
  ++it->second.dest_seq;
}

void RouteTable::purge(NodeId node) {
  for (auto& [dst, e] : entries_) {
    if (dst == node || e.next_hop == node) e.valid = false;
  }
}

std::uint32_t RouteTable::request_seq(NodeId destination, SimTime now) const {
  auto it = entries_.find(destination);
  if (it == entries_.end()) return 0;
  const RouteEntry& e = it->second;
  return e.valid && e.expires_at <= now ? e.dest_seq + 1 : e.dest_seq;
}

std::uint32_t RouteTable::known_seq(NodeId destination) const {
  auto it = entries_.find(destination);
  return it == entries_.end() ? 0 : it->second.dest_seq;
}

}  // namespace manet
