#include "manet/scenario/simulation.hpp"

#include <algorithm>
#include <numeric>

namespace manet {
namespace {

LinkModel link_of(const ScenarioConfig& cfg) {
  cfg.validate();
  return LinkModel{cfg.range, cfg.base_loss_prob, cfg.buffer_capacity, SimTime::from_seconds(cfg.per_hop_latency_s)};
}

void trace_to(TraceSink* sink, const TraceRecord& rec) {
  if (sink != nullptr) sink->record(rec);
}

}  // namespace

Simulation::Simulation(ScenarioConfig cfg, TraceSink* trace)
    : cfg_(std::move(cfg)), trace_(trace), net_(link_of(cfg_), cfg_.seed, trace) {
  period_ = cfg_.detection_period();
  traffic_end_ = SimTime::from_seconds(cfg_.duration_s - cfg_.drain_s);
  scheme_ = std::make_unique<SimulatedSignatureScheme>(splitmix64(cfg_.seed ^ 0x6b65'7973ULL), cfg_.k);
  pick_adversaries();
  build_nodes();
  pick_flows();
  net_.set_receiver([this](NodeId receiver, NodeId from, const Message& msg) { deliver(receiver, from, msg); });
  net_.set_link_observer([this](NodeId src, NodeId dst, bool granted) {
    node(src).detector->on_link_attempt(dst, granted);
  });
}

void Simulation::pick_adversaries() {
  if (!cfg_.grayhole.ids.empty()) {
    adversaries_ = cfg_.grayhole.ids;
  } else if (cfg_.grayhole.count > 0) {
    std::vector<NodeId> pool;
    for (std::uint32_t i = 1; i <= cfg_.nodes; ++i) {
      if (cfg_.grayhole.badmouth_target && cfg_.grayhole.badmouth_target->value() == i) continue;
      pool.emplace_back(i);
    }
    RngStream rng(cfg_.seed, "roster");
    for (std::size_t i = 0; i < cfg_.grayhole.count && i < pool.size(); ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      adversaries_.push_back(pool[i]);
    }
  }
  std::sort(adversaries_.begin(), adversaries_.end());
}

void Simulation::build_nodes() {
  const RandomWaypoint model(cfg_.area, cfg_.max_speed, cfg_.pause_s);
  const std::set<NodeId> bad(adversaries_.begin(), adversaries_.end());

  RoutingParams rp;
  rp.discovery_timeout = SimTime::from_seconds(cfg_.discovery_timeout_s);
  rp.pending_capacity = cfg_.pending_capacity;
  rp.route_lifetime = SimTime::from_seconds(cfg_.route_lifetime_s);

  const DetectConfig& dc = cfg_.detect;
  DetectionParams dp;
  dp.period = period_;
  dp.threshold_interval = SimTime::from_seconds(dc.threshold_s);
  dp.churn_scaling = dc.churn_scaling;
  dp.epoch_length = SimTime::from_seconds(dc.epoch_length_s);
  dp.rrep_wait = SimTime::from_seconds(dc.rrep_wait_s);
  dp.probe_slack = SimTime::from_seconds(dc.probe_slack_s);
  dp.query_timeout = SimTime::from_seconds(dc.query_timeout_s);
  dp.probe_gap = SimTime::from_seconds(dc.probe_gap_s);
  dp.coop_window = SimTime::from_seconds(dc.coop_window_s);
  dp.coop_scope = static_cast<std::uint8_t>(dc.coop_scope);
  dp.through_rule = dc.through_rule;
  dp.probe_payload = cfg_.payload;

  AlarmParams ap;
  ap.mode = cfg_.propagate;
  ap.relay_hops = static_cast<std::uint8_t>(dc.alarm_hops);
  ap.epoch_length = period_;
  ap.corroborate = dc.corroborate;

  for (std::uint32_t i = 1; i <= cfg_.nodes; ++i) {
    const NodeId id(i);
    if (!cfg_.positions.empty()) {
      net_.add_node(id, Trajectory(cfg_.positions.at(id)));
    } else {
      net_.add_node(id, Trajectory(model, RngStream(cfg_.seed, "mobility/" + to_string(id))));
    }

    auto n = std::make_unique<NodeAgents>();
    NodeAgents* self = n.get();
    n->id = id;
    n->adversary = bad.count(id) != 0;

    if (n->adversary) {
      GrayHoleParams gp;
      gp.p_good_to_bad = cfg_.grayhole.p_gb;
      gp.p_bad_to_good = cfg_.grayhole.p_bg;
      gp.phase_tick = SimTime::from_seconds(cfg_.grayhole.phase_tick_s);
      gp.min_rate = cfg_.grayhole.min_rate;
      gp.max_rate = cfg_.grayhole.max_rate;
      gp.initial_phase = cfg_.grayhole.initial_phase;
      gp.victims = cfg_.grayhole.victims;
      if (cfg_.grayhole.collude) gp.colluding_group = bad;
      gp.sync_evasion = cfg_.grayhole.sync_evasion;
      gp.evasion_window = SimTime::from_seconds(cfg_.grayhole.evasion_window_s);
      n->grayhole =
          std::make_unique<GrayHoleAgent>(id, gp, RngStream(cfg_.seed, "adversary/" + to_string(id)), period_);
    }

    AodvAgent::Hooks rh;
    rh.on_forward = [self](std::optional<NodeId> prev, NodeId next, const DataPacket& pkt) {
      self->detector->on_forward(prev, next, pkt);
    };
    rh.on_deliver = [this, self](NodeId prev, const DataPacket& pkt) {
      if (pkt.data_class == DataClass::cbr) {
        trace_to(trace_, TraceRecord{net_.now(), PacketKind::data, pkt.src.value(), pkt.dst.value(), Outcome::received,
                                     wire_bytes(Message{pkt}), {}, {}});
      }
      self->detector->on_deliver(prev, pkt);
    };
    if (n->grayhole) {
      rh.drop_transit = [this, self](NodeId, const DataPacket& pkt) {
        return self->grayhole->should_drop(pkt, net_.now());
      };
      rh.fabricate_reply = [self](const Rreq& msg) { return self->grayhole->fabricate(msg); };
    }
    rh.is_isolated = [self](NodeId other) { return self->alarm->is_faulty(other); };
    rh.piggyback_out = [self] { return self->alarm->piggyback_out(); };
    rh.piggyback_in = [self](const FaultyListDigest& d) { self->alarm->piggyback_in(d); };
    rh.on_probe_rrep = [self](NodeId from, const Rrep& msg) { self->detector->on_probe_rrep(from, msg); };
    n->routing = std::make_unique<AodvAgent>(id, net_, rp, std::move(rh));

    DetectionParams ndp = dp;
    ndp.initiate = cfg_.detection && !n->adversary;
    Detector::Hooks dh;
    dh.is_isolated = [self](NodeId other) { return self->alarm->is_faulty(other); };
    dh.on_result = [this, self](const RoundResult& r) {
      self->alarm->on_round_result(r);
      if (observer_) observer_(r);
    };
    n->detector = std::make_unique<Detector>(id, net_, *n->routing, ndp, std::move(dh));

    AlarmParams nap = ap;
    if (n->adversary) {
      nap.role = cfg_.grayhole.collude && cfg_.grayhole.badmouth_target ? AlarmRole::colluder : AlarmRole::silent;
      nap.badmouth_target = cfg_.grayhole.badmouth_target;
    }
    AlarmAgent::Hooks ah;
    if (ndp.initiate) {
      ah.corroborate = [self](NodeId suspect) {
        return self->detector->start_cooperative_round(suspect, RoundPurpose::corroborate).has_value();
      };
    }
    ah.on_commit = [self](NodeId member) { self->routing->isolate(member); };
    n->alarm = std::make_unique<AlarmAgent>(id, net_, *scheme_, scheme_->issue(id), nap, std::move(ah));

    trace_to(trace_, TraceRecord{SimTime{}, PacketKind::roster, i, 0,
                                 n->adversary ? Outcome::adversary : Outcome::honest, 0, {}, {}});

    if (cfg_.detection) {
      n->detector->start();
      n->alarm->start();
    } else if (nap.role == AlarmRole::colluder) {
      n->alarm->start();
    }
    if (n->grayhole) n->grayhole->start(net_.engine());
    nodes_.push_back(std::move(n));
  }
}

void Simulation::pick_flows() {
  RngStream rng(cfg_.seed, "traffic");
  if (!cfg_.flow_pairs.empty()) {
    flows_ = cfg_.flow_pairs;
  } else {
    std::vector<NodeId> honest;
    for (const auto& n : nodes_)
      if (!n->adversary) honest.push_back(n->id);
    if (honest.size() >= 2) {
      for (std::size_t f = 0; f < cfg_.flows; ++f) {
        const NodeId src = honest[rng.index(honest.size())];
        NodeId dst = src;
        while (dst == src) dst = honest[rng.index(honest.size())];
        flows_.push_back(FlowSpec{src, dst});
      }
    }
  }
  for (std::size_t f = 0; f < flows_.size(); ++f) start_flow(f, SimTime::from_seconds(rng.uniform(0.0, cfg_.flow_start_max_s)));
}

void Simulation::start_flow(std::size_t index, SimTime at) {
  if (at >= traffic_end_) return;
  net_.engine().schedule(at, [this, index] { send_cbr(index, 0); });
}

void Simulation::send_cbr(std::size_t index, std::uint32_t seq) {
  const FlowSpec& flow = flows_[index];
  DataPacket pkt;
  pkt.src = flow.src;
  pkt.dst = flow.dst;
  pkt.flow_id = static_cast<std::uint32_t>(index + 1);
  pkt.seq = seq;
  pkt.payload_bytes = cfg_.payload;
  pkt.ttl = node(flow.src).routing->params().data_ttl;
  trace_to(trace_, TraceRecord{net_.now(), PacketKind::data, flow.src.value(), flow.dst.value(), Outcome::originated,
                               wire_bytes(Message{pkt}), {}, {}});
  node(flow.src).routing->send_data(pkt);
  const SimTime next = net_.now() + SimTime::from_seconds(1.0 / cfg_.packet_rate);
  if (next < traffic_end_) net_.engine().schedule(next, [this, index, seq] { send_cbr(index, seq + 1); });
}

void Simulation::deliver(NodeId receiver, NodeId from, const Message& msg) {
  NodeAgents& n = node(receiver);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rreq> || std::is_same_v<T, Rrep> || std::is_same_v<T, DataPacket>) {
          n.routing->receive(from, msg);
        } else if constexpr (std::is_same_v<T, Alarm> || std::is_same_v<T, FaultyListUpdate>) {
          n.alarm->receive(from, msg);
        } else {
          n.detector->receive(from, msg);
        }
      },
      msg);
}

void Simulation::run_until(SimTime t) { net_.engine().run_until(t); }

void Simulation::run() {
  if (finished_) return;
  run_until(end_time());
  trace_to(trace_, TraceRecord{end_time(), PacketKind::end, 0, 0, Outcome::complete, 0, {}, {}});
  finished_ = true;
}

}  // namespace manet
