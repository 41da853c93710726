#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "manet/alarm/signature.hpp"
#include "manet/proto/messages.hpp"

namespace manet {

class AlarmError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One accuser's signed alarm.
struct AlarmMessage {
  NodeId suspect;
  std::uint64_t epoch = 0;
  SignedAccusation accusation;
};

struct AlarmAggregate {
  NodeId suspect;
  std::uint64_t epoch = 0;
  std::map<NodeId, SignedAccusation> signatures;  // keyed by accuser
  bool complete = false;

  std::vector<SignedAccusation> list() const;
};

/// Signs an accusation. The signer is the accuser.
AlarmMessage raise_alarm(const Signer& accuser, NodeId suspect, std::uint64_t epoch, std::uint64_t evidence_nonce);

/// Checks one signature against its claim.
bool verify_accusation(const SignatureScheme& scheme, NodeId suspect, std::uint64_t epoch,
                       const SignedAccusation& sig);

/// Folds verified alarms into an aggregate. Invalid signatures and
/// self-accusations are dropped and counted in `rejected`. Throws AlarmError
/// when the messages disagree on suspect or epoch.
AlarmAggregate aggregate_alarms(const std::vector<AlarmMessage>& pending, const SignatureScheme& scheme,
                                std::size_t* rejected = nullptr);

/// Adds the verified signatures of `sigs` to `agg`. Returns how many were new.
std::size_t absorb(AlarmAggregate& agg, const std::vector<SignedAccusation>& sigs, const SignatureScheme& scheme,
                   std::size_t* rejected = nullptr);

class FaultyList {
 public:
  const std::set<NodeId>& members() const { return members_; }
  std::uint64_t version() const { return version_; }
  const std::map<NodeId, AlarmAggregate>& proofs() const { return proofs_; }
  bool contains(NodeId id) const { return members_.count(id) != 0; }

  /// Removes a member without touching the version. Used only by the
  /// neighborhood-scoped partial list.
  void forget(NodeId id);

  FaultyListDigest digest() const;

 private:
  friend FaultyList commit_faulty(FaultyList list, const AlarmAggregate& agg);
  std::set<NodeId> members_;
  std::uint64_t version_ = 0;
  std::map<NodeId, AlarmAggregate> proofs_;
};

/// Adds the aggregate's suspect. Throws AlarmError when incomplete. Committing
/// an existing member changes nothing.
FaultyList commit_faulty(FaultyList list, const AlarmAggregate& agg);

/// Re-verifies a received proof from scratch.
std::optional<AlarmAggregate> verify_proof(const FaultyProof& proof, const SignatureScheme& scheme);

}  // namespace manet
