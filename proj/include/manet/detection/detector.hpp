#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "manet/detection/dri.hpp"
#include "manet/detection/probe_check.hpp"
#include "manet/routing/aodv.hpp"
#include "manet/sim/network.hpp"

namespace manet {

struct DetectionParams {
  /// Runs periodic scans. Off for adversaries and for detection-off baselines;
  /// such nodes still answer as witnesses, cooperators and relays.
  bool initiate = true;
  SimTime period = SimTime::from_seconds_int(10);
  SimTime threshold_interval = SimTime::from_seconds_int(10);
  bool churn_scaling = true;
  /// Evidence lifetime. Every bit, check bits included, is cleared at rollover.
  SimTime epoch_length = SimTime::from_seconds_int(30);
  SimTime presence_interval = SimTime::from_seconds_int(1);
  SimTime rrep_wait = SimTime::from_millis(60);
  SimTime probe_slack = SimTime::from_millis(100);
  SimTime query_timeout = SimTime::from_millis(60);
  SimTime probe_gap = SimTime::from_millis(50);
  int further_probes = 3;
  SimTime coop_window = SimTime::from_seconds_int(1);
  /// Radius, in hops from the initiator, of the cooperative request flood.
  std::uint8_t coop_scope = 2;
  ThroughRule through_rule = ThroughRule::final_hop;
  std::uint32_t probe_payload = 512;
};

enum class RoundState : std::uint8_t { awaiting_rrep, probe_sent, querying_cn, escalated, cleared, verdict };
enum class RoundPurpose : std::uint8_t { scan, corroborate };

struct RoundResult {
  std::uint64_t nonce = 0;
  NodeId initiator;
  NodeId suspect;
  std::optional<NodeId> cooperator;
  RoundPurpose purpose = RoundPurpose::scan;
  /// One of cleared, no_rrep, unreachable_cn, malicious,
  /// not_confirmed, insufficient_witnesses.
  Outcome outcome = Outcome::cleared;
  std::set<NodeId> victims;
  SimTime at;
};

/// Per-node detection agent: DRI bookkeeping, periodic suspect scans, and
/// every role in the probing protocol (initiator, cooperator, witness, relay).
class Detector {
 public:
  struct Hooks {
    std::function<bool(NodeId)> is_isolated;
    /// Terminal outcome of every round this node initiated. Escalations are
    /// traced but not reported; the cooperative stage reports for them.
    std::function<void(const RoundResult&)> on_result;
  };

  Detector(NodeId self, Network& net, AodvAgent& routing, DetectionParams params, Hooks hooks);

  /// Arms presence sampling and, when initiating, the periodic scan.
  void start();

  NodeId self() const { return self_; }
  const DetectionParams& params() const { return params_; }
  const DriTable& dri() const { return dri_; }
  DriTable& dri() { return dri_; }

  // Routing observations.
  void on_forward(std::optional<NodeId> prev, NodeId next, const DataPacket& pkt);
  void on_deliver(NodeId prev, const DataPacket& pkt);
  void on_probe_rrep(NodeId from, const Rrep& msg);
  void on_link_attempt(NodeId dst, bool granted) { dri_.count_attempt(dst, granted); }

  /// Detection protocol messages (coop requests, notifications, queries).
  void receive(NodeId from, const Message& msg);

  /// Runs one scan now: suspects, CN choice and local rounds.
  void scan();

  /// Starts the local stage against `suspect` with cooperator `cn`.
  std::optional<std::uint64_t> start_local_round(NodeId suspect, NodeId cn);
  /// Starts the cooperative stage directly (used to corroborate alarms).
  std::optional<std::uint64_t> start_cooperative_round(NodeId suspect, RoundPurpose purpose);

  bool round_active(NodeId suspect) const { return active_.count(suspect) != 0; }
  SimTime current_threshold() const { return threshold_; }
  std::uint64_t rounds_started() const { return rounds_started_; }

 private:
  struct Round {
    std::uint64_t nonce = 0;
    NodeId suspect;
    std::optional<NodeId> cooperator;
    RoundPurpose purpose = RoundPurpose::scan;
    RoundState state = RoundState::awaiting_rrep;
    SimTime ttl_deadline;
    ProbeCheckTable table;
  };
  struct WitnessDuty {
    NodeId initiator;
    NodeId suspect;
    std::vector<NodeId> route;  // self ... initiator
    bool probing = false;
  };

  bool isolated(NodeId id) const { return hooks_.is_isolated && hooks_.is_isolated(id); }
  std::uint64_t fresh_nonce();
  void sample_presence();
  void schedule_scan(SimTime at);
  void trace_verdict(const Round& round, Outcome outcome);
  void finish(std::uint64_t nonce, Outcome outcome, std::set<NodeId> victims = {});
  void query_cooperator(std::uint64_t nonce);
  void escalate(std::uint64_t nonce);
  void close_cooperative(std::uint64_t nonce);

  void handle_request(NodeId from, const CoopDetectRequest& msg);
  void handle_notification(NodeId from, Notification msg);
  void handle_query(NodeId from, const ProbeQuery& msg);
  void handle_reply(NodeId from, const ProbeQueryReply& msg);
  void send_further_probes(std::uint64_t nonce);

  NodeId self_;
  Network& net_;
  AodvAgent& routing_;
  DetectionParams params_;
  Hooks hooks_;
  DriTable dri_;
  SimTime threshold_;
  std::size_t churn_changes_ = 0;
  bool sampled_once_ = false;
  std::uint32_t nonce_counter_ = 0;
  std::uint64_t rounds_started_ = 0;

  std::map<std::uint64_t, Round> rounds_;   // as initiator
  std::set<NodeId> active_;                 // suspects with a live round
  std::map<std::uint64_t, WitnessDuty> duties_;
  std::set<std::uint64_t> seen_requests_;
  std::set<std::uint64_t> probes_received_;  // as cooperator
};

}  // namespace manet
