#include "manet/alarm/alarm.hpp"

namespace manet {

std::vector<SignedAccusation> AlarmAggregate::list() const {
  std::vector<SignedAccusation> out;
  out.reserve(signatures.size());
  for (const auto& [_, s] : signatures) out.push_back(s);
  return out;
}

AlarmMessage raise_alarm(const Signer& accuser, NodeId suspect, std::uint64_t epoch, std::uint64_t evidence_nonce) {
  const AccusationClaim claim{suspect, epoch, evidence_nonce};
  return AlarmMessage{suspect, epoch, SignedAccusation{accuser.id(), evidence_nonce, accuser.sign(claim)}};
}

bool verify_accusation(const SignatureScheme& scheme, NodeId suspect, std::uint64_t epoch,
                       const SignedAccusation& sig) {
  if (sig.accuser == suspect) return false;
  return scheme.verify(sig.accuser, AccusationClaim{suspect, epoch, sig.evidence_nonce}, sig.token);
}

std::size_t absorb(AlarmAggregate& agg, const std::vector<SignedAccusation>& sigs, const SignatureScheme& scheme,
                   std::size_t* rejected) {
  std::size_t added = 0;
  for (const auto& s : sigs) {
    if (agg.signatures.count(s.accuser) != 0) continue;
    if (!verify_accusation(scheme, agg.suspect, agg.epoch, s)) {
      if (rejected != nullptr) ++*rejected;
      continue;
    }
    agg.signatures.emplace(s.accuser, s);
    ++added;
  }
  agg.complete = agg.signatures.size() >= scheme.k();
  return added;
}

AlarmAggregate aggregate_alarms(const std::vector<AlarmMessage>& pending, const SignatureScheme& scheme,
                                std::size_t* rejected) {
  AlarmAggregate agg;
  if (pending.empty()) return agg;
  agg.suspect = pending.front().suspect;
  agg.epoch = pending.front().epoch;
  std::vector<SignedAccusation> sigs;
  for (const auto& m : pending) {
    if (m.suspect != agg.suspect) throw AlarmError("alarms name different suspects");
    if (m.epoch != agg.epoch) throw AlarmError("alarms belong to different epochs");
    sigs.push_back(m.accusation);
  }
  absorb(agg, sigs, scheme, rejected);
  return agg;
}

void FaultyList::forget(NodeId id) {
  members_.erase(id);
  proofs_.erase(id);
}

FaultyListDigest FaultyList::digest() const {
  FaultyListDigest d;
  d.version = version_;
  for (const auto& [id, agg] : proofs_) d.proofs.push_back(FaultyProof{id, agg.epoch, agg.list()});
  return d;
}

FaultyList commit_faulty(FaultyList list, const AlarmAggregate& agg) {
  if (!agg.complete) throw AlarmError("cannot commit an incomplete alarm");
  if (list.members_.insert(agg.suspect).second) {
    list.proofs_[agg.suspect] = agg;
    ++list.version_;
  }
  return list;
}

std::optional<AlarmAggregate> verify_proof(const FaultyProof& proof, const SignatureScheme& scheme) {
  AlarmAggregate agg;
  agg.suspect = proof.member;
  agg.epoch = proof.epoch;
  absorb(agg, proof.signatures, scheme);
  if (!agg.complete) return std::nullopt;
  return agg;
}

}  // namespace manet
