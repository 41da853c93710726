#pragma once

#include <optional>
#include <set>

#include "manet/proto/messages.hpp"
#include "manet/sim/engine.hpp"
#include "manet/sim/rng.hpp"

namespace manet {

enum class Phase : std::uint8_t { good, bad };
enum class DropVerdict : std::uint8_t { forward, drop };

struct GrayHoleParams {
  double p_good_to_bad = 0.2;
  double p_bad_to_good = 0.2;
  SimTime phase_tick = SimTime::from_seconds_int(5);
  double min_rate = 0.2;
  double max_rate = 1.0;
  Phase initial_phase = Phase::good;
  /// When set, only packets from or to these nodes are dropped.
  std::optional<std::set<NodeId>> victims;
  /// Fellow adversaries. They are never attacked and never accused.
  std::set<NodeId> colluding_group;
  /// Stay good for `evasion_window` after every detection invocation.
  bool sync_evasion = false;
  SimTime evasion_window = SimTime::from_seconds_int(2);

  /// Throws ConfigError for out-of-domain probabilities or rates.
  void validate() const;
};

/// Two-phase Markov drop machine.
struct GrayHoleState {
  Phase phase = Phase::good;
  double p_good_to_bad = 0.2;
  double p_bad_to_good = 0.2;
  SimTime phase_tick = SimTime::from_seconds_int(5);
  double min_rate = 0.2;
  double max_rate = 1.0;
  /// Resampled on every good-to-bad transition.
  double current_drop_rate = 0.0;
  std::optional<std::set<NodeId>> victim_set;
  std::set<NodeId> colluding_group;

  double effective_drop_probability() const { return phase == Phase::bad ? current_drop_rate : 0.0; }
};

GrayHoleState make_grayhole_state(const GrayHoleParams& params, RngStream& rng);

/// One Markov step. Entering the bad phase draws a fresh drop rate uniformly
/// from [min_rate, max_rate].
GrayHoleState phase_transition(GrayHoleState state, RngStream& rng);

/// Verdict for a data-class packet transiting the adversary.
DropVerdict drop_decision(const GrayHoleState& state, const DataPacket& pkt, RngStream& rng);

/// Route reply an adversary sends for any RREQ: a one-hop route with an
/// inflated sequence number. For a RREQ targeting the adversary itself it is
/// the ordinary zero-hop reply.
Rrep on_rreq_as_grayhole(NodeId self, const Rreq& msg, std::uint32_t own_seq,
                         SimTime lifetime = SimTime::from_seconds_int(10));

/// Sequence-number inflation used by fabricated replies.
inline constexpr std::uint32_t kSpuriousSeqBoost = 1000;

/// Per-node adversary driver: owns the Markov state and its phase timer.
class GrayHoleAgent {
 public:
  GrayHoleAgent(NodeId self, GrayHoleParams params, RngStream rng, SimTime detection_period);

  /// Arms the phase timer.
  void start(Engine& engine);

  NodeId self() const { return self_; }
  const GrayHoleState& state() const { return state_; }
  Phase effective_phase(SimTime now) const;

  bool should_drop(const DataPacket& pkt, SimTime now);
  /// Fabricated reply for the honest routing layer, or nullopt to let the
  /// node answer normally.
  std::optional<Rrep> fabricate(const Rreq& msg);

  std::uint64_t drops() const { return drops_; }

 private:
  void tick(Engine& engine);

  NodeId self_;
  GrayHoleParams params_;
  RngStream rng_;
  SimTime detection_period_;
  GrayHoleState state_;
  std::uint64_t drops_ = 0;
};

}  // namespace manet
