#include "manet/detection/detector.hpp"

#include <algorithm>

#include "manet/detection/invocation.hpp"
#include "manet/sim/rng.hpp"

namespace manet {

Detector::Detector(NodeId self, Network& net, AodvAgent& routing, DetectionParams params, Hooks hooks)
    : self_(self),
      net_(net),
      routing_(routing),
      params_(params),
      hooks_(std::move(hooks)),
      dri_(self),
      threshold_(params.threshold_interval) {}

void Detector::start() {
  net_.engine().schedule_after(SimTime{}, [this] { sample_presence(); });
  if (params_.initiate) schedule_scan(net_.now() + params_.period);
}

std::uint64_t Detector::fresh_nonce() {
  return (static_cast<std::uint64_t>(self_.value()) << 32) | ++nonce_counter_;
}

void Detector::sample_presence() {
  const std::size_t changes = dri_.observe_presence(net_.neighbors(self_), net_.now(), threshold_ * 2);
  if (sampled_once_) churn_changes_ += changes;
  sampled_once_ = true;
  net_.engine().schedule_after(params_.presence_interval, [this] { sample_presence(); });
}

void Detector::schedule_scan(SimTime at) {
  net_.engine().schedule(at, [this] {
    scan();
    schedule_scan(net_.now() + params_.period);
  });
}

void Detector::scan() {
  const SimTime now = net_.now();
  if (params_.churn_scaling) {
    const double n = static_cast<double>(std::max<std::size_t>(1, net_.neighbors(self_).size()));
    const double churn = static_cast<double>(churn_changes_) / n *
                         (params_.threshold_interval.seconds() / params_.period.seconds());
    threshold_ = scaled_threshold(params_.threshold_interval, churn);
  }
  churn_changes_ = 0;

  for (NodeId sn : scan_suspects(dri_, threshold_, now)) {
    if (isolated(sn) || round_active(sn)) continue;
    net_.trace(TraceRecord{now, PacketKind::dri_scan, self_.value(), sn.value(), Outcome::suspect, 0, {}, {}});
    auto cn = select_cooperative_node(dri_, sn);
    if (!cn || isolated(*cn)) continue;  // deferred to the next scan
    start_local_round(sn, *cn);
  }
  if (now - dri_.epoch_started() >= params_.epoch_length) dri_.roll_epoch(now);
}

std::optional<std::uint64_t> Detector::start_local_round(NodeId suspect, NodeId cn) {
  if (suspect == self_ || cn == suspect || cn == self_ || round_active(suspect)) return std::nullopt;
  const std::uint64_t nonce = fresh_nonce();
  Round r;
  r.nonce = nonce;
  r.suspect = suspect;
  r.cooperator = cn;
  r.state = RoundState::awaiting_rrep;
  rounds_.emplace(nonce, std::move(r));
  active_.insert(suspect);
  ++rounds_started_;
  routing_.send_route_query(std::nullopt, cn, nonce);
  net_.engine().schedule_after(params_.rrep_wait, [this, nonce] {
    auto it = rounds_.find(nonce);
    if (it != rounds_.end() && it->second.state == RoundState::awaiting_rrep) finish(nonce, Outcome::no_rrep);
  });
  return nonce;
}

std::optional<std::uint64_t> Detector::start_cooperative_round(NodeId suspect, RoundPurpose purpose) {
  if (suspect == self_ || round_active(suspect) || isolated(suspect)) return std::nullopt;
  const std::uint64_t nonce = fresh_nonce();
  Round r;
  r.nonce = nonce;
  r.suspect = suspect;
  r.purpose = purpose;
  r.state = RoundState::probe_sent;  // placeholder; escalate() moves it on
  rounds_.emplace(nonce, std::move(r));
  active_.insert(suspect);
  ++rounds_started_;
  escalate(nonce);
  return nonce;
}

void Detector::trace_verdict(const Round& round, Outcome outcome) {
  net_.trace(
      TraceRecord{net_.now(), PacketKind::verdict, self_.value(), round.suspect.value(), outcome, 0, round.nonce, {}});
}

void Detector::finish(std::uint64_t nonce, Outcome outcome, std::set<NodeId> victims) {
  auto it = rounds_.find(nonce);
  if (it == rounds_.end()) return;
  Round& r = it->second;
  r.state = outcome == Outcome::cleared ? RoundState::cleared : RoundState::verdict;
  trace_verdict(r, outcome);
  RoundResult result{nonce, self_, r.suspect, r.cooperator, r.purpose, outcome, std::move(victims), net_.now()};
  active_.erase(r.suspect);
  rounds_.erase(it);
  if (hooks_.on_result) hooks_.on_result(result);
}

void Detector::on_probe_rrep(NodeId from, const Rrep& msg) {
  const std::uint64_t nonce = *msg.probe_nonce;
  if (auto it = rounds_.find(nonce); it != rounds_.end()) {
    Round& r = it->second;
    if (r.state != RoundState::awaiting_rrep || from != r.suspect) return;
    DataPacket probe;
    probe.src = self_;
    probe.dst = *r.cooperator;
    probe.payload_bytes = params_.probe_payload;
    probe.ttl = routing_.params().data_ttl;
    probe.data_class = DataClass::probe;
    probe.nonce = nonce;
    probe.forced_next_hop = r.suspect;
    r.state = RoundState::probe_sent;
    const std::int64_t hops = static_cast<std::int64_t>(msg.hop_count) + 1;
    r.ttl_deadline = net_.now() + net_.link().per_hop_latency * (2 * hops) + params_.probe_slack;
    routing_.send_data(probe);
    net_.engine().schedule(r.ttl_deadline, [this, nonce] { query_cooperator(nonce); });
    return;
  }
  if (auto it = duties_.find(nonce); it != duties_.end()) {
    WitnessDuty& d = it->second;
    if (d.probing || from != d.suspect) return;
    d.probing = true;
    send_further_probes(nonce);
  }
}

void Detector::query_cooperator(std::uint64_t nonce) {
  auto it = rounds_.find(nonce);
  if (it == rounds_.end() || it->second.state != RoundState::probe_sent) return;
  Round& r = it->second;
  const NodeId cn = *r.cooperator;
  if (isolated(cn) || !net_.in_range(self_, cn)) {
    finish(nonce, Outcome::unreachable_cn);
    return;
  }
  r.state = RoundState::querying_cn;
  net_.transmit(self_, cn, ProbeQuery{nonce, self_, cn});
  net_.engine().schedule_after(params_.query_timeout, [this, nonce] {
    auto again = rounds_.find(nonce);
    if (again != rounds_.end() && again->second.state == RoundState::querying_cn) {
      trace_verdict(again->second, Outcome::escalate);
      escalate(nonce);
    }
  });
}

void Detector::handle_reply(NodeId from, const ProbeQueryReply& msg) {
  auto it = rounds_.find(msg.nonce);
  if (it == rounds_.end()) return;
  Round& r = it->second;
  if (r.state != RoundState::querying_cn || !r.cooperator || from != *r.cooperator) return;
  if (msg.received) {
    dri_.set_check_bit(r.suspect);
    finish(msg.nonce, Outcome::cleared);
    return;
  }
  trace_verdict(r, Outcome::escalate);
  escalate(msg.nonce);
}

void Detector::escalate(std::uint64_t nonce) {
  auto it = rounds_.find(nonce);
  if (it == rounds_.end()) return;
  Round& r = it->second;
  r.state = RoundState::escalated;
  CoopDetectRequest req;
  req.nonce = nonce;
  req.initiator = self_;
  req.suspect = r.suspect;
  req.path = {self_};
  req.hops_left = params_.coop_scope > 0 ? static_cast<std::uint8_t>(params_.coop_scope - 1) : 0;
  for (NodeId n : net_.neighbors(self_)) {
    if (n != r.suspect && !isolated(n)) net_.transmit(self_, n, req);
  }
  net_.engine().schedule_after(params_.coop_window, [this, nonce] { close_cooperative(nonce); });
}

void Detector::close_cooperative(std::uint64_t nonce) {
  auto it = rounds_.find(nonce);
  if (it == rounds_.end() || it->second.state != RoundState::escalated) return;
  CoopVerdict v = evaluate(it->second.table);
  switch (v.outcome) {
    case CoopOutcome::malicious:
      finish(nonce, Outcome::malicious, std::move(v.victims));
      break;
    case CoopOutcome::not_confirmed:
      dri_.set_check_bit(it->second.suspect);
      finish(nonce, Outcome::not_confirmed);
      break;
    case CoopOutcome::insufficient_witnesses:
      finish(nonce, Outcome::insufficient_witnesses);
      break;
  }
}

void Detector::receive(NodeId from, const Message& msg) {
  if (isolated(from)) return;
  if (const auto* req = std::get_if<CoopDetectRequest>(&msg)) {
    handle_request(from, *req);
  } else if (const auto* note = std::get_if<Notification>(&msg)) {
    handle_notification(from, *note);
  } else if (const auto* query = std::get_if<ProbeQuery>(&msg)) {
    handle_query(from, *query);
  } else if (const auto* reply = std::get_if<ProbeQueryReply>(&msg)) {
    handle_reply(from, *reply);
  }
}

void Detector::handle_request(NodeId /*from*/, const CoopDetectRequest& msg) {
  if (msg.initiator == self_ || msg.suspect == self_ || isolated(msg.initiator)) return;
  if (!seen_requests_.insert(msg.nonce).second) return;

  if (!isolated(msg.suspect) && net_.in_range(self_, msg.suspect)) {
    WitnessDuty duty;
    duty.initiator = msg.initiator;
    duty.suspect = msg.suspect;
    duty.route.push_back(self_);
    duty.route.insert(duty.route.end(), msg.path.rbegin(), msg.path.rend());
    duties_[msg.nonce] = std::move(duty);
    routing_.send_route_query(msg.suspect, msg.initiator, msg.nonce);
    const std::uint64_t nonce = msg.nonce;
    net_.engine().schedule_after(params_.rrep_wait, [this, nonce] {
      auto it = duties_.find(nonce);
      if (it != duties_.end() && !it->second.probing) duties_.erase(it);
    });
  }

  if (msg.hops_left == 0) return;
  CoopDetectRequest next = msg;
  next.path.push_back(self_);
  next.hops_left -= 1;
  for (NodeId n : net_.neighbors(self_)) {
    if (n == msg.suspect || isolated(n)) continue;
    if (std::find(next.path.begin(), next.path.end(), n) != next.path.end()) continue;
    net_.transmit(self_, n, next);
  }
}

void Detector::send_further_probes(std::uint64_t nonce) {
  // Offset each witness within the gap so concurrent rounds do not burst the suspect's buffer.
  const std::int64_t gap = params_.probe_gap.nanos();
  const std::uint64_t mix = splitmix64(nonce ^ (std::uint64_t{self_.value()} << 40));
  const SimTime offset = SimTime::from_nanos(gap > 0 ? static_cast<std::int64_t>(mix % static_cast<std::uint64_t>(gap)) : 0);
  for (int i = 0; i < params_.further_probes; ++i) {
    net_.engine().schedule_after(offset + params_.probe_gap * i, [this, nonce, i] {
      auto it = duties_.find(nonce);
      if (it == duties_.end()) return;
      if (!net_.in_range(self_, it->second.suspect)) {
        duties_.erase(it);  // the suspect moved away: not a witness any more, stay silent
        return;
      }
      DataPacket p;
      p.src = self_;
      p.dst = it->second.initiator;
      p.payload_bytes = params_.probe_payload;
      p.ttl = routing_.params().data_ttl;
      p.data_class = DataClass::further_probe;
      p.nonce = nonce;
      p.attempt = static_cast<std::uint8_t>(i + 1);
      p.forced_next_hop = it->second.suspect;
      routing_.send_data(p);
      if (i + 1 < params_.further_probes) return;
      // Notify only once every probe was handed to the suspect.
      const WitnessDuty d = std::move(it->second);
      duties_.erase(it);
      if (d.route.size() < 2) return;
      net_.transmit(self_, d.route[1], Notification{nonce, self_, d.initiator, d.route, 1});
    });
  }
}

void Detector::handle_notification(NodeId /*from*/, Notification msg) {
  if (msg.hop_index >= msg.route.size() || msg.route[msg.hop_index] != self_) return;
  if (msg.hop_index + 1 == msg.route.size()) {
    auto it = rounds_.find(msg.nonce);
    if (it != rounds_.end() && it->second.state == RoundState::escalated)
      it->second.table.record_notification(msg.witness);
    return;
  }
  msg.hop_index += 1;
  const NodeId next = msg.route[msg.hop_index];
  if (isolated(next)) return;
  net_.transmit(self_, next, msg);
}

void Detector::handle_query(NodeId from, const ProbeQuery& msg) {
  if (msg.cooperator != self_) return;
  net_.transmit(self_, from, ProbeQueryReply{msg.nonce, self_, probes_received_.count(msg.nonce) != 0});
}

void Detector::on_forward(std::optional<NodeId> prev, NodeId next, const DataPacket& pkt) {
  if (pkt.data_class != DataClass::cbr) return;
  const SimTime now = net_.now();
  if (prev) {
    dri_observe_forward(dri_, *prev, next, pkt.dst, now, params_.through_rule);
  } else if (next == pkt.dst) {
    dri_.mark_through(next, now);
  }
}

void Detector::on_deliver(NodeId prev, const DataPacket& pkt) {
  switch (pkt.data_class) {
    case DataClass::cbr:
      dri_.mark_from(prev, net_.now());
      break;
    case DataClass::probe:
      probes_received_.insert(pkt.nonce);
      break;
    case DataClass::further_probe:
      if (auto it = rounds_.find(pkt.nonce); it != rounds_.end() && it->second.state == RoundState::escalated)
        it->second.table.record_further_probe(pkt.src);
      break;
  }
}

}  // namespace manet
