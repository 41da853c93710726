#pragma once

#include <cstdint>
#include <map>
#include <set>

#include "manet/sim/types.hpp"

namespace manet {

enum class CoopOutcome : std::uint8_t { malicious, not_confirmed, insufficient_witnesses };

struct CoopVerdict {
  CoopOutcome outcome = CoopOutcome::insufficient_witnesses;
  /// Notifying witnesses none of whose further probes reached the initiator.
  std::set<NodeId> victims;
};

/// Per-round record at the initiator: which notifying witnesses got at least
/// one further probe through the suspect.
class ProbeCheckTable {
 public:
  void record_notification(NodeId witness) { notified_.insert(witness); }
  /// May arrive before or after the witness's notification.
  void record_further_probe(NodeId witness) { probed_.insert(witness); }

  /// probe_status per notifying witness.
  std::map<NodeId, std::uint8_t> rows() const;
  std::size_t witnesses() const { return notified_.size(); }

 private:
  std::set<NodeId> notified_;
  std::set<NodeId> probed_;
};

/// Three-probe rule: a witness is a victim when none of its probes arrived.
CoopVerdict evaluate(const ProbeCheckTable& table);

}  // namespace manet
