#include "manet/alarm/signature.hpp"

#include "manet/sim/rng.hpp"

namespace manet {
namespace {

std::uint64_t claim_digest(const AccusationClaim& c) {
  std::uint64_t h = splitmix64(c.suspect.value());
  h = splitmix64(h ^ c.epoch);
  return splitmix64(h ^ c.evidence_nonce);
}

std::uint64_t mac(std::uint64_t secret, const AccusationClaim& c) { return splitmix64(secret ^ claim_digest(c)); }

class SimulatedSigner final : public Signer {
 public:
  SimulatedSigner(NodeId id, std::uint64_t secret) : id_(id), secret_(secret) {}
  NodeId id() const override { return id_; }
  std::uint64_t sign(const AccusationClaim& claim) const override { return mac(secret_, claim); }

 private:
  NodeId id_;
  std::uint64_t secret_;
};

}  // namespace

SimulatedSignatureScheme::SimulatedSignatureScheme(std::uint64_t seed, std::size_t k) : seed_(seed), k_(k) {
  if (k == 0) throw ConfigError("k must be >= 1");
}

std::uint64_t SimulatedSignatureScheme::secret(NodeId node) const {
  return splitmix64(seed_ ^ splitmix64(0x5167'6e00ULL + node.value()));
}

std::unique_ptr<Signer> SimulatedSignatureScheme::issue(NodeId node) {
  if (!node.valid()) throw ConfigError("cannot issue a key for node 0");
  if (!issued_.insert(node).second) throw ConfigError("key for node " + to_string(node) + " already issued");
  return std::make_unique<SimulatedSigner>(node, secret(node));
}

bool SimulatedSignatureScheme::verify(NodeId signer, const AccusationClaim& claim, std::uint64_t token) const {
  return signer.valid() && mac(secret(signer), claim) == token;
}

}  // namespace manet
