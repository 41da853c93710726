#include "manet/detection/probe_check.hpp"

namespace manet {

std::map<NodeId, std::uint8_t> ProbeCheckTable::rows() const {
  std::map<NodeId, std::uint8_t> out;
  for (NodeId w : notified_) out[w] = probed_.count(w) ? 1 : 0;
  return out;
}

CoopVerdict evaluate(const ProbeCheckTable& table) {
  CoopVerdict v;
  if (table.witnesses() == 0) return v;
  for (const auto& [w, status] : table.rows())
    if (status == 0) v.victims.insert(w);
  v.outcome = v.victims.empty() ? CoopOutcome::not_confirmed : CoopOutcome::malicious;
  return v;
}

}  // namespace manet
