#include "manet/routing/aodv.hpp"

#include <algorithm>

namespace manet {

AodvAgent::AodvAgent(NodeId self, Network& net, RoutingParams params, Hooks hooks)
    : self_(self), net_(net), params_(params), hooks_(std::move(hooks)) {}

std::optional<FaultyListDigest> AodvAgent::piggyback() const {
  if (!hooks_.piggyback_out) return std::nullopt;
  auto digest = hooks_.piggyback_out();
  if (digest && digest->empty()) return std::nullopt;
  return digest;
}

void AodvAgent::broadcast(const Message& msg) {
  for (NodeId n : net_.neighbors(self_)) {
    if (!isolated(n)) net_.transmit(self_, n, msg);
  }
}

void AodvAgent::trace_drop(const DataPacket& pkt, Outcome outcome) {
  TraceRecord rec;
  rec.t = net_.now();
  rec.kind = kind_of(Message{pkt});
  rec.src = pkt.src.value();
  rec.dst = pkt.dst.value();
  rec.outcome = outcome;
  rec.bytes = wire_bytes(Message{pkt});
  if (pkt.data_class != DataClass::cbr) rec.nonce = pkt.nonce;
  net_.trace(rec);
}

void AodvAgent::receive(NodeId from, const Message& msg) {
  if (const auto* rreq = std::get_if<Rreq>(&msg)) {
    handle_rreq(from, *rreq);
  } else if (const auto* rrep = std::get_if<Rrep>(&msg)) {
    handle_rrep(from, *rrep);
  } else if (const auto* data = std::get_if<DataPacket>(&msg)) {
    forward_data(from, *data);
  }
}

std::optional<NodeId> AodvAgent::next_hop(NodeId destination) {
  if (destination == self_) return std::nullopt;
  if (!isolated(destination) && net_.in_range(self_, destination)) return destination;
  const SimTime now = net_.now();
  if (auto entry = routes_.lookup(destination, now)) {
    if (isolated(entry->next_hop) || !net_.in_range(self_, entry->next_hop)) {
      routes_.invalidate(destination);
      return std::nullopt;
    }
    return entry->next_hop;
  }
  return std::nullopt;
}

void AodvAgent::install(NodeId destination, NodeId next_hop, std::uint32_t hops, std::uint32_t seq) {
  if (destination == self_ || isolated(next_hop) || isolated(destination)) return;
  routes_.offer(RouteEntry{destination, next_hop, hops, seq, net_.now() + params_.route_lifetime, true}, net_.now());
}

void AodvAgent::send_data(DataPacket pkt) {
  if (pkt.dst == self_) return;
  if (isolated(pkt.dst)) {
    trace_drop(pkt, Outcome::no_route);
    return;
  }
  if (pkt.forced_next_hop) {
    const NodeId first = *pkt.forced_next_hop;
    pkt.forced_next_hop.reset();
    net_.transmit(self_, first, pkt);
    return;
  }
  route_and_send(std::move(pkt), std::nullopt);
}

void AodvAgent::route_and_send(DataPacket pkt, std::optional<NodeId> prev) {
  if (auto next = next_hop(pkt.dst)) {
    routes_.refresh(pkt.dst, net_.now() + params_.route_lifetime);
    net_.transmit(self_, *next, pkt);
    if (hooks_.on_forward) hooks_.on_forward(prev, *next, pkt);
    return;
  }
  const NodeId dst = pkt.dst;
  enqueue(std::move(pkt));
  if (!discovery_pending(dst)) originate_rreq(dst);
}

void AodvAgent::enqueue(DataPacket pkt) {
  if (pending_.size() >= params_.pending_capacity) {
    trace_drop(pkt, Outcome::buffer_overflow);
    return;
  }
  pending_.push_back(std::move(pkt));
}

void AodvAgent::flush_pending(NodeId destination) {
  if (pending_.empty()) return;
  std::deque<DataPacket> keep;
  std::vector<DataPacket> ready;
  for (auto& p : pending_) {
    if (p.dst == destination) {
      ready.push_back(std::move(p));
    } else {
      keep.push_back(std::move(p));
    }
  }
  pending_ = std::move(keep);
  if (ready.empty()) return;
  discoveries_.erase(destination);
  for (auto& p : ready) route_and_send(std::move(p), std::nullopt);
}

void AodvAgent::originate_rreq(NodeId target) {
  if (target == self_) return;
  if (next_hop(target)) {
    flush_pending(target);
    return;
  }
  ++own_seq_;
  ++broadcast_id_;
  ++rreqs_originated_;
  seen_rreqs_.insert({self_, broadcast_id_});
  Rreq msg;
  msg.origin = self_;
  msg.target = target;
  msg.broadcast_id = broadcast_id_;
  msg.hop_count = 0;
  msg.origin_seq = own_seq_;
  msg.target_seq_known = routes_.request_seq(target, net_.now());
  msg.ttl = params_.rreq_ttl;
  msg.piggybacked_faulty_list = piggyback();
  const std::uint64_t generation = ++discovery_generation_;
  discoveries_[target] = generation;
  net_.engine().schedule_after(params_.discovery_timeout,
                               [this, target, generation] { discovery_timeout(target, generation); });
  broadcast(msg);
}

void AodvAgent::discovery_timeout(NodeId target, std::uint64_t generation) {
  auto it = discoveries_.find(target);
  if (it == discoveries_.end() || it->second != generation) return;
  discoveries_.erase(it);
  if (next_hop(target)) {
    flush_pending(target);
    return;
  }

  std::deque<DataPacket> keep;
  for (auto& p : pending_) {
    if (p.dst == target) {
      trace_drop(p, Outcome::no_route);
    } else {
      keep.push_back(std::move(p));
    }
  }
  pending_ = std::move(keep);
}

void AodvAgent::send_route_query(std::optional<NodeId> to, NodeId target, std::uint64_t nonce) {
  Rreq msg;
  msg.origin = self_;
  msg.target = target;
  msg.broadcast_id = ++broadcast_id_;
  msg.origin_seq = own_seq_;
  msg.target_seq_known = routes_.known_seq(target);
  msg.ttl = 1;
  msg.probe_nonce = nonce;
  if (to) {
    net_.transmit(self_, *to, msg);
  } else {
    broadcast(msg);
  }
}

void AodvAgent::handle_rreq(NodeId from, const Rreq& msg) {
  if (isolated(from) || isolated(msg.origin) || msg.origin == self_) return;
  if (msg.piggybacked_faulty_list && hooks_.piggyback_in) hooks_.piggyback_in(*msg.piggybacked_faulty_list);
  // The piggyback may just have convicted the sender.
  if (isolated(from) || isolated(msg.origin)) return;

  auto reply_to = [&](Rrep reply) {
    reply.probe_nonce = msg.probe_nonce;
    reply.piggybacked_faulty_list = msg.probe_nonce ? std::nullopt : piggyback();
    net_.transmit(self_, from, reply);
  };

  if (msg.probe_nonce) {
    // Detection route query: answer from local knowledge only.
    if (hooks_.fabricate_reply) {
      if (auto fake = hooks_.fabricate_reply(msg)) {
        reply_to(*fake);
        return;
      }
    }
    Rrep reply{msg.origin, msg.target, self_, 0, 0, params_.route_lifetime, std::nullopt, std::nullopt};
    if (msg.target == self_) {
      reply.target_seq = own_seq_;
    } else if (!isolated(msg.target) && net_.in_range(self_, msg.target)) {
      reply.hop_count = 1;
      reply.target_seq = routes_.known_seq(msg.target);
    } else if (auto entry = routes_.lookup(msg.target, net_.now()); entry && !isolated(entry->next_hop)) {
      reply.hop_count = entry->hop_count;
      reply.target_seq = entry->dest_seq;
    } else {
      return;
    }
    reply_to(reply);
    return;
  }

  if (!seen_rreqs_.insert({msg.origin, msg.broadcast_id}).second) return;

  install(msg.origin, from, msg.hop_count + 1, msg.origin_seq);
  flush_pending(msg.origin);

  if (hooks_.fabricate_reply) {
    if (auto fake = hooks_.fabricate_reply(msg)) {
      reply_to(*fake);
      return;
    }
  }

  if (msg.target == self_) {
    own_seq_ = std::max(own_seq_, msg.target_seq_known) + 1;
    reply_to(Rrep{msg.origin, self_, self_, 0, own_seq_, params_.route_lifetime, std::nullopt, std::nullopt});
    return;
  }
  if (auto entry = routes_.lookup(msg.target, net_.now());
      entry && entry->dest_seq >= msg.target_seq_known && entry->next_hop != from && !isolated(entry->next_hop)) {
    reply_to(Rrep{msg.origin, msg.target, self_, entry->hop_count, entry->dest_seq, params_.route_lifetime,
                  std::nullopt, std::nullopt});
    return;
  }
  if (msg.ttl <= 1) return;
  Rreq next = msg;
  next.hop_count += 1;
  next.ttl -= 1;
  next.piggybacked_faulty_list = piggyback();
  ++rreqs_rebroadcast_;
  broadcast(next);
}

void AodvAgent::handle_rrep(NodeId from, const Rrep& msg) {
  if (isolated(from)) return;
  if (msg.piggybacked_faulty_list && hooks_.piggyback_in) hooks_.piggyback_in(*msg.piggybacked_faulty_list);
  if (isolated(from)) return;
  if (msg.probe_nonce) {
    if (hooks_.on_probe_rrep) hooks_.on_probe_rrep(from, msg);
    return;
  }
  if (isolated(msg.target)) return;

  const bool changed = routes_.offer(RouteEntry{msg.target, from, msg.hop_count + 1, msg.target_seq,
                                                net_.now() + msg.lifetime, true},
                                     net_.now());
  if (msg.origin == self_) {
    flush_pending(msg.target);
    return;
  }
  if (!changed) return;
  auto reverse = routes_.lookup(msg.origin, net_.now());
  if (!reverse || isolated(reverse->next_hop)) {
    TraceRecord rec;
    rec.t = net_.now();
    rec.kind = PacketKind::rrep;
    rec.src = msg.replier.value();
    rec.dst = msg.origin.value();
    rec.outcome = Outcome::no_route;
    rec.bytes = wire_bytes(Message{msg});
    net_.trace(rec);
    return;
  }
  Rrep next = msg;
  next.hop_count += 1;
  next.piggybacked_faulty_list = piggyback();
  routes_.refresh(msg.origin, net_.now() + params_.route_lifetime);
  net_.transmit(self_, reverse->next_hop, next);
}

void AodvAgent::forward_data(NodeId from, DataPacket pkt) {
  if (isolated(from) || isolated(pkt.src)) {
    trace_drop(pkt, Outcome::no_route);
    return;
  }
  if (pkt.dst == self_) {
    if (hooks_.on_deliver) hooks_.on_deliver(from, pkt);
    return;
  }
  if (hooks_.drop_transit && hooks_.drop_transit(from, pkt)) {
    trace_drop(pkt, Outcome::malicious_drop);
    return;
  }
  if (pkt.ttl <= 1) {
    trace_drop(pkt, Outcome::ttl_expired);
    return;
  }
  pkt.ttl -= 1;
  route_and_send(std::move(pkt), from);
}

void AodvAgent::isolate(NodeId node) {
  routes_.purge(node);
  std::deque<DataPacket> keep;
  for (auto& p : pending_) {
    if (p.dst == node) {
      trace_drop(p, Outcome::no_route);
    } else {
      keep.push_back(std::move(p));
    }
  }
  pending_ = std::move(keep);
}

}  // namespace manet
