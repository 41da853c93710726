#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "manet/alarm/alarm.hpp"
#include "manet/detection/detector.hpp"
#include "manet/sim/network.hpp"

namespace manet {

enum class PropagationMode : std::uint8_t { piggyback, neighborhood };

enum class AlarmRole : std::uint8_t {
  /// Signs only on its own Malicious verdict.
  honest,
  /// Adversary that never signs anything.
  silent,
  /// Adversary that forges and co-signs alarms against a chosen target.
  colluder,
};

struct AlarmParams {
  PropagationMode mode = PropagationMode::piggyback;
  /// Hops an alarm travels past the last node that added a signature.
  std::uint8_t relay_hops = 2;
  /// Epoch length (the detection period).
  SimTime epoch_length = SimTime::from_seconds_int(10);
  std::uint64_t expiry_epochs = 3;
  /// Run an own cooperative round when an alarm names a neighbor.
  bool corroborate = true;
  SimTime presence_interval = SimTime::from_seconds_int(1);
  AlarmRole role = AlarmRole::honest;
  std::optional<NodeId> badmouth_target;
};

/// Per-node alarm handling: signing, aggregation, relaying, committing and
/// faulty-list propagation.
class AlarmAgent {
 public:
  struct Hooks {
    /// Asks the local detector for a corroborating cooperative round.
    std::function<bool(NodeId suspect)> corroborate;
    /// A node was committed to the local faulty list.
    std::function<void(NodeId member)> on_commit;
  };

  AlarmAgent(NodeId self, Network& net, const SignatureScheme& scheme, std::unique_ptr<Signer> signer,
             AlarmParams params, Hooks hooks);

  void start();

  const FaultyList& faulty() const { return faulty_; }
  bool is_faulty(NodeId id) const { return faulty_.contains(id); }
  std::uint64_t epoch_of(SimTime t) const { return static_cast<std::uint64_t>(t.nanos() / params_.epoch_length.nanos()); }
  std::size_t rejected_signatures() const { return rejected_; }
  std::size_t pending_alarms() const { return pending_.size(); }

  void on_round_result(const RoundResult& result);
  void receive(NodeId from, const Message& msg);

  std::optional<FaultyListDigest> piggyback_out() const;
  void piggyback_in(const FaultyListDigest& digest);

 private:
  using Key = std::pair<NodeId, std::uint64_t>;  // (suspect, epoch)
  struct Pending {
    AlarmAggregate agg;
    bool signed_here = false;
  };

  bool may_sign(NodeId suspect) const;
  void sign_into(Pending& p, std::uint64_t evidence_nonce);
  void handle_alarm(NodeId from, const Alarm& msg);
  void send_alarm(const AlarmAggregate& agg, std::uint8_t hops_left, std::optional<NodeId> skip);
  /// True when the suspect was not yet a member.
  bool commit(const AlarmAggregate& agg);
  void merge(const FaultyListDigest& digest);
  void send_partial_list(NodeId to);
  void tick();
  void sample_presence();

  NodeId self_;
  Network& net_;
  const SignatureScheme& scheme_;
  std::unique_ptr<Signer> signer_;
  AlarmParams params_;
  Hooks hooks_;
  FaultyList faulty_;
  std::map<Key, Pending> pending_;
  /// Latest own Malicious verdict per suspect: (nonce, time).
  std::map<NodeId, std::pair<std::uint64_t, SimTime>> verdicts_;
  std::set<NodeId> neighbors_;
  std::size_t rejected_ = 0;
  std::uint64_t forged_ = 0;
};

}  // namespace manet
