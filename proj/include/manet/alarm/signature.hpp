#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>

#include "manet/sim/types.hpp"

namespace manet {

/// The statement an accuser signs.
struct AccusationClaim {
  NodeId suspect;
  std::uint64_t epoch = 0;
  std::uint64_t evidence_nonce = 0;
};

/// Signing capability of one node. Only the scheme can create it.
class Signer {
 public:
  virtual ~Signer() = default;
  virtual NodeId id() const = 0;
  virtual std::uint64_t sign(const AccusationClaim& claim) const = 0;
};

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  /// Signatures needed for a complete alarm.
  virtual std::size_t k() const = 0;
  /// Hands out `node`'s key. Throws ConfigError when issued twice.
  virtual std::unique_ptr<Signer> issue(NodeId node) = 0;
  virtual bool verify(NodeId signer, const AccusationClaim& claim, std::uint64_t token) const = 0;
};

/// Keyed 64-bit hash with one secret per node. Unforgeable inside the
/// simulator because secrets never leave the scheme; not cryptography.
class SimulatedSignatureScheme final : public SignatureScheme {
 public:
  explicit SimulatedSignatureScheme(std::uint64_t seed, std::size_t k = 3);

  std::size_t k() const override { return k_; }
  std::unique_ptr<Signer> issue(NodeId node) override;
  bool verify(NodeId signer, const AccusationClaim& claim, std::uint64_t token) const override;

 private:
  std::uint64_t secret(NodeId node) const;

  std::uint64_t seed_;
  std::size_t k_;
  std::set<NodeId> issued_;
};

}  // namespace manet
