#include "manet/sim/network.hpp"

#include <string>

namespace manet {

Outcome to_outcome(DeliveryOutcome outcome) {
  switch (outcome) {
    case DeliveryOutcome::delivered:
      return Outcome::delivered;
    case DeliveryOutcome::lost_channel:
      return Outcome::lost_channel;
    case DeliveryOutcome::dropped_buffer:
      return Outcome::dropped_buffer;
    case DeliveryOutcome::out_of_range:
      break;
  }
  return Outcome::out_of_range;
}

Network::Network(LinkModel link, std::uint64_t seed, TraceSink* trace)
    : link_(link), loss_rng_(seed, "link-loss"), trace_(trace) {}

void Network::add_node(NodeId id, Trajectory trajectory) {
  if (!id.valid()) throw ConfigError("node id must be nonzero");
  if (nodes_.count(id) != 0) throw ConfigError("duplicate node id " + to_string(id));
  nodes_.emplace(id, Slot{std::move(trajectory), 0, SimTime::from_nanos(-1), Position{}});
}

std::vector<NodeId> Network::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) ids.push_back(id);
  return ids;
}

Network::Slot& Network::slot(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ConfigError("unknown node id " + to_string(id));
  return it->second;
}

Position Network::position(NodeId id) {
  Slot& s = slot(id);
  const SimTime t = now();
  if (s.cached_at != t) {
    s.cached = s.trajectory.position_at(t);
    s.cached_at = t;
  }
  return s.cached;
}

double Network::distance(NodeId a, NodeId b) { return manet::distance(position(a), position(b)); }

bool Network::in_range(NodeId a, NodeId b) { return a != b && distance(a, b) <= link_.range; }

std::vector<NodeId> Network::neighbors(NodeId id) {
  const Position me = position(id);
  std::vector<NodeId> out;
  for (auto& [other, _] : nodes_) {
    if (other == id) continue;
    if (manet::distance(me, position(other)) <= link_.range) out.push_back(other);
  }
  return out;
}

DeliveryOutcome Network::transmit(NodeId src, NodeId dst, const Message& msg) {
  if (src == dst) throw EngineError("transmit to self from node " + to_string(src));
  Slot& receiver = slot(dst);
  slot(src);
  ++transmissions_;

  TraceRecord rec;
  rec.t = now();
  rec.kind = kind_of(msg);
  rec.src = src.value();
  rec.dst = dst.value();
  rec.bytes = wire_bytes(msg);
  rec.nonce = nonce_of(msg);
  if (const auto* fl = piggyback_of(msg)) rec.faulty_list = fl->render();

  DeliveryOutcome outcome = DeliveryOutcome::delivered;
  if (!in_range(src, dst)) {
    outcome = DeliveryOutcome::out_of_range;
  } else if (loss_rng_.bernoulli(link_.base_loss_prob)) {
    outcome = DeliveryOutcome::lost_channel;
  } else if (link_.buffer_capacity && receiver.in_flight >= *link_.buffer_capacity) {
    outcome = DeliveryOutcome::dropped_buffer;
  }
  if (observer_) observer_(src, dst, outcome == DeliveryOutcome::delivered || outcome == DeliveryOutcome::lost_channel);

  if (outcome != DeliveryOutcome::delivered) {
    rec.outcome = to_outcome(outcome);
    trace(rec);
    return outcome;
  }

  ++receiver.in_flight;
  engine_.schedule_after(link_.per_hop_latency, [this, src, dst, msg, rec]() mutable {
    --slot(dst).in_flight;
    rec.t = now();
    rec.outcome = Outcome::delivered;
    trace(rec);
    if (receiver_) receiver_(dst, src, msg);
  });
  return outcome;
}

}  // namespace manet
