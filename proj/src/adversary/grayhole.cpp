#include "manet/adversary/grayhole.hpp"

#include <algorithm>
#include <string>

namespace manet {

void GrayHoleParams::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
  };
  prob(p_good_to_bad, "grayhole.p_gb");
  prob(p_bad_to_good, "grayhole.p_bg");
  prob(min_rate, "grayhole.min_rate");
  prob(max_rate, "grayhole.max_rate");
  if (min_rate > max_rate) throw ConfigError("grayhole.min_rate must not exceed grayhole.max_rate");
  if (phase_tick <= SimTime{}) throw ConfigError("grayhole.phase_tick must be positive");
}

namespace {
double draw_rate(const GrayHoleState& s, RngStream& rng) { return rng.uniform(s.min_rate, s.max_rate); }
}  // namespace

GrayHoleState make_grayhole_state(const GrayHoleParams& params, RngStream& rng) {
  params.validate();
  GrayHoleState s;
  s.phase = params.initial_phase;
  s.p_good_to_bad = params.p_good_to_bad;
  s.p_bad_to_good = params.p_bad_to_good;
  s.phase_tick = params.phase_tick;
  s.min_rate = params.min_rate;
  s.max_rate = params.max_rate;
  s.victim_set = params.victims;
  s.colluding_group = params.colluding_group;
  if (s.phase == Phase::bad) s.current_drop_rate = draw_rate(s, rng);
  return s;
}

GrayHoleState phase_transition(GrayHoleState state, RngStream& rng) {
  if (state.phase == Phase::good) {
    if (rng.bernoulli(state.p_good_to_bad)) {
      state.phase = Phase::bad;
      state.current_drop_rate = draw_rate(state, rng);
    }
  } else if (rng.bernoulli(state.p_bad_to_good)) {
    state.phase = Phase::good;
  }
  return state;
}

DropVerdict drop_decision(const GrayHoleState& state, const DataPacket& pkt, RngStream& rng) {
  if (state.phase == Phase::good) return DropVerdict::forward;
  if (state.victim_set && state.victim_set->count(pkt.src) == 0 && state.victim_set->count(pkt.dst) == 0) {
    return DropVerdict::forward;
  }
  return rng.bernoulli(state.current_drop_rate) ? DropVerdict::drop : DropVerdict::forward;
}

Rrep on_rreq_as_grayhole(NodeId self, const Rreq& msg, std::uint32_t own_seq, SimTime lifetime) {
  Rrep reply;
  reply.origin = msg.origin;
  reply.target = msg.target;
  reply.replier = self;
  reply.lifetime = lifetime;
  if (msg.target == self) {
    reply.hop_count = 0;
    reply.target_seq = std::max(own_seq, msg.target_seq_known) + 1;
    return reply;
  }
  reply.hop_count = 1;
  reply.target_seq = msg.target_seq_known + kSpuriousSeqBoost;
  return reply;
}

GrayHoleAgent::GrayHoleAgent(NodeId self, GrayHoleParams params, RngStream rng, SimTime detection_period)
    : self_(self), params_(std::move(params)), rng_(std::move(rng)), detection_period_(detection_period) {
  state_ = make_grayhole_state(params_, rng_);
}

void GrayHoleAgent::start(Engine& engine) {
  engine.schedule_after(state_.phase_tick, [this, &engine] { tick(engine); });
}

void GrayHoleAgent::tick(Engine& engine) {
  state_ = phase_transition(state_, rng_);
  engine.schedule_after(state_.phase_tick, [this, &engine] { tick(engine); });
}

Phase GrayHoleAgent::effective_phase(SimTime now) const {
  if (params_.sync_evasion && detection_period_ > SimTime{}) {
    const std::int64_t into_period = now.nanos() % detection_period_.nanos();
    if (into_period < params_.evasion_window.nanos()) return Phase::good;
  }
  return state_.phase;
}

bool GrayHoleAgent::should_drop(const DataPacket& pkt, SimTime now) {
  if (effective_phase(now) == Phase::good) return false;
  if (params_.colluding_group.count(pkt.src) != 0 || params_.colluding_group.count(pkt.dst) != 0) return false;
  if (drop_decision(state_, pkt, rng_) == DropVerdict::drop) {
    ++drops_;
    return true;
  }
  return false;
}

std::optional<Rrep> GrayHoleAgent::fabricate(const Rreq& msg) {
  if (msg.target == self_) return std::nullopt;
  if (params_.colluding_group.count(msg.origin) != 0) return std::nullopt;
  return on_rreq_as_grayhole(self_, msg, 0);
}

}  // namespace manet
