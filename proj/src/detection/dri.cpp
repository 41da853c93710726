#include "manet/detection/dri.hpp"

#include <algorithm>

namespace manet {

const DriEntry* DriTable::find(NodeId neighbor) const {
  auto it = entries_.find(neighbor);
  return it == entries_.end() ? nullptr : &it->second;
}

DriEntry& DriTable::upsert(NodeId neighbor) {
  auto [it, inserted] = entries_.try_emplace(neighbor);
  if (inserted) it->second.neighbor = neighbor;
  return it->second;
}

void DriTable::mark_from(NodeId neighbor, SimTime now) {
  if (neighbor == owner_) return;
  DriEntry& e = upsert(neighbor);
  e.from_bit = 1;
  e.last_interaction = now;
}

void DriTable::mark_through(NodeId neighbor, SimTime now) {
  if (neighbor == owner_) return;
  DriEntry& e = upsert(neighbor);
  e.through_bit = 1;
  e.last_interaction = now;
}

void DriTable::set_check_bit(NodeId neighbor) {
  if (neighbor == owner_) return;
  upsert(neighbor).check_bit = 1;
}

void DriTable::count_attempt(NodeId neighbor, bool granted) {
  auto it = entries_.find(neighbor);
  if (it == entries_.end()) return;
  ++it->second.rts_count;
  if (granted) ++it->second.cts_count;
}

std::size_t DriTable::observe_presence(const std::vector<NodeId>& neighbors, SimTime now, SimTime forget_after) {
  std::size_t changes = 0;
  for (auto& [id, e] : entries_) {
    const bool present = std::binary_search(neighbors.begin(), neighbors.end(), id);
    if (!present && e.adjacent) {
      e.adjacent = false;
      ++changes;
    }
  }
  for (NodeId n : neighbors) {
    if (n == owner_) continue;
    DriEntry& e = upsert(n);
    if (!e.adjacent) {
      e.adjacent = true;
      e.adjacent_since = now;
      ++changes;
    }
    e.last_seen = now;
  }
  std::erase_if(entries_, [&](const auto& kv) {
    const DriEntry& e = kv.second;
    return !e.adjacent && now - e.last_seen > forget_after;
  });
  return changes;
}

void DriTable::roll_epoch(SimTime now) {
  epoch_started_ = now;
  for (auto& [_, e] : entries_) {
    e.from_bit = 0;
    e.through_bit = 0;
    e.check_bit = 0;
  }
}

void dri_observe_forward(DriTable& table, NodeId prev_hop, NodeId next_hop, NodeId final_destination, SimTime now,
                         ThroughRule rule) {
  table.mark_from(prev_hop, now);
  if (rule == ThroughRule::any_forward || next_hop == final_destination) table.mark_through(next_hop, now);
}

std::vector<NodeId> scan_suspects(const DriTable& table, SimTime threshold_interval, SimTime now) {
  std::vector<NodeId> out;
  if (now - table.epoch_started() < threshold_interval) return out;
  for (const auto& [id, e] : table.entries()) {
    if (!e.adjacent || now - e.adjacent_since < threshold_interval) continue;
    if (e.from_bit == 0 && e.through_bit == 0 && e.check_bit == 0) out.push_back(id);
  }
  return out;  // std::map iteration is already ascending
}

std::optional<NodeId> select_cooperative_node(const DriTable& table, NodeId suspect) {
  const DriEntry* best = nullptr;
  for (const auto& [id, e] : table.entries()) {
    if (id == suspect || !e.adjacent || e.interaction_score() == 0) continue;
    if (best == nullptr || e.interaction_score() > best->interaction_score() ||
        (e.interaction_score() == best->interaction_score() && e.last_interaction > best->last_interaction)) {
      best = &e;  // ascending iteration keeps the lowest id on full ties
    }
  }
  if (best != nullptr) return best->neighbor;
  // No data moved at all, e.g. a black hole swallowing every flow: fall back
  // to the longest-standing neighbor so the suspect still gets probed.
  for (const auto& [id, e] : table.entries()) {
    if (id == suspect || !e.adjacent) continue;
    if (best == nullptr || e.adjacent_since < best->adjacent_since) best = &e;
  }
  if (best == nullptr) return std::nullopt;
  return best->neighbor;
}

}  // namespace manet
