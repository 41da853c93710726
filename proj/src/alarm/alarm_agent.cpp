#include "manet/alarm/alarm_agent.hpp"

#include <algorithm>
#include <vector>

namespace manet {

AlarmAgent::AlarmAgent(NodeId self, Network& net, const SignatureScheme& scheme, std::unique_ptr<Signer> signer,
                       AlarmParams params, Hooks hooks)
    : self_(self),
      net_(net),
      scheme_(scheme),
      signer_(std::move(signer)),
      params_(std::move(params)),
      hooks_(std::move(hooks)) {
  if (params_.epoch_length <= SimTime{}) throw ConfigError("alarm epoch length must be positive");
}

void AlarmAgent::start() {
  net_.engine().schedule_after(params_.epoch_length, [this] { tick(); });
  if (params_.mode == PropagationMode::neighborhood)
    net_.engine().schedule_after(SimTime{}, [this] { sample_presence(); });
}

bool AlarmAgent::may_sign(NodeId suspect) const {
  switch (params_.role) {
    case AlarmRole::silent:
      return false;
    case AlarmRole::colluder:
      return params_.badmouth_target && *params_.badmouth_target == suspect;
    case AlarmRole::honest:
      break;
  }
  auto it = verdicts_.find(suspect);
  if (it == verdicts_.end()) return false;
  return net_.now() - it->second.second <= params_.epoch_length * static_cast<std::int64_t>(params_.expiry_epochs);
}

void AlarmAgent::sign_into(Pending& p, std::uint64_t evidence_nonce) {
  if (p.signed_here) return;
  const AlarmMessage msg = raise_alarm(*signer_, p.agg.suspect, p.agg.epoch, evidence_nonce);
  absorb(p.agg, {msg.accusation}, scheme_, &rejected_);
  p.signed_here = true;
}

void AlarmAgent::on_round_result(const RoundResult& result) {
  if (result.outcome != Outcome::malicious || params_.role != AlarmRole::honest) return;
  verdicts_[result.suspect] = {result.nonce, result.at};
  if (is_faulty(result.suspect)) return;

  std::vector<Key> keys;
  for (auto& [key, p] : pending_)
    if (key.first == result.suspect && !p.signed_here) keys.push_back(key);
  if (keys.empty()) {
    const Key key{result.suspect, epoch_of(net_.now())};
    if (pending_.count(key) != 0) return;  // already signed this epoch
    Pending& p = pending_[key];
    p.agg.suspect = result.suspect;
    p.agg.epoch = key.second;
    keys.push_back(key);
  }
  for (const Key& key : keys) {
    auto it = pending_.find(key);
    if (it == pending_.end()) continue;
    sign_into(it->second, result.nonce);
    if (it->second.agg.complete) {
      const AlarmAggregate done = it->second.agg;
      if (commit(done)) send_alarm(done, params_.relay_hops, std::nullopt);
      return;
    }
    send_alarm(it->second.agg, params_.relay_hops, std::nullopt);
  }
}

void AlarmAgent::receive(NodeId from, const Message& msg) {
  if (const auto* alarm = std::get_if<Alarm>(&msg)) {
    handle_alarm(from, *alarm);
  } else if (const auto* update = std::get_if<FaultyListUpdate>(&msg)) {
    merge(update->list);
  }
}

void AlarmAgent::handle_alarm(NodeId from, const Alarm& msg) {
  if (msg.suspect == self_ || is_faulty(msg.suspect) || is_faulty(from)) return;
  const std::uint64_t now_epoch = epoch_of(net_.now());
  if (msg.epoch > now_epoch || now_epoch - msg.epoch >= params_.expiry_epochs) return;

  const Key key{msg.suspect, msg.epoch};
  Pending& p = pending_[key];
  p.agg.suspect = msg.suspect;
  p.agg.epoch = msg.epoch;
  const std::size_t added = absorb(p.agg, msg.signatures, scheme_, &rejected_);

  bool signed_now = false;
  if (!p.agg.complete && !p.signed_here && may_sign(msg.suspect)) {
    const std::uint64_t nonce = params_.role == AlarmRole::honest
                                    ? verdicts_.at(msg.suspect).first
                                    : ((static_cast<std::uint64_t>(self_.value()) << 32) | (1ULL << 31) | ++forged_);
    sign_into(p, nonce);
    signed_now = true;
  }
  if (p.agg.complete) {
    // Each node commits once per suspect, so re-announcing every fresh commit
    // floods the finished alarm exactly once and reaches the earlier signers.
    const AlarmAggregate done = p.agg;
    if (commit(done)) send_alarm(done, params_.relay_hops, signed_now ? std::nullopt : std::optional<NodeId>(from));
    return;
  }
  if (signed_now) {
    send_alarm(p.agg, params_.relay_hops, std::nullopt);
  } else if (added > 0 && msg.hops_left > 0) {
    send_alarm(p.agg, static_cast<std::uint8_t>(msg.hops_left - 1), from);
  }
  if (params_.role == AlarmRole::honest && params_.corroborate && !p.signed_here && hooks_.corroborate &&
      net_.in_range(self_, msg.suspect)) {
    hooks_.corroborate(msg.suspect);
  }
}

void AlarmAgent::send_alarm(const AlarmAggregate& agg, std::uint8_t hops_left, std::optional<NodeId> skip) {
  const Alarm msg{agg.suspect, agg.epoch, agg.list(), hops_left};
  for (NodeId n : net_.neighbors(self_)) {
    if (n == agg.suspect || (skip && n == *skip) || is_faulty(n)) continue;
    net_.transmit(self_, n, msg);
  }
}

bool AlarmAgent::commit(const AlarmAggregate& agg) {
  if (is_faulty(agg.suspect) || agg.suspect == self_) return false;
  const AlarmAggregate proof = agg;  // `agg` may live inside pending_
  faulty_ = commit_faulty(std::move(faulty_), proof);
  std::erase_if(pending_, [&](const auto& kv) { return kv.first.first == proof.suspect; });
  TraceRecord rec{net_.now(), PacketKind::faulty_list, self_.value(), proof.suspect.value(), Outcome::commit, 0, {}, {}};
  rec.faulty_list = faulty_.digest().render();
  net_.trace(rec);
  if (hooks_.on_commit) hooks_.on_commit(proof.suspect);
  return true;
}

void AlarmAgent::merge(const FaultyListDigest& digest) {
  for (const FaultyProof& proof : digest.proofs) {
    if (proof.member == self_ || is_faulty(proof.member)) continue;
    if (params_.mode == PropagationMode::neighborhood && !net_.in_range(self_, proof.member)) continue;
    auto agg = verify_proof(proof, scheme_);
    if (!agg) {
      ++rejected_;
      continue;
    }
    commit(*agg);
  }
}

std::optional<FaultyListDigest> AlarmAgent::piggyback_out() const {
  if (params_.mode != PropagationMode::piggyback || faulty_.members().empty()) return std::nullopt;
  return faulty_.digest();
}

void AlarmAgent::piggyback_in(const FaultyListDigest& digest) {
  if (params_.mode == PropagationMode::piggyback) merge(digest);
}

void AlarmAgent::send_partial_list(NodeId to) {
  if (is_faulty(to) || faulty_.members().empty()) return;
  net_.transmit(self_, to, FaultyListUpdate{faulty_.digest()});
}

void AlarmAgent::sample_presence() {
  const std::vector<NodeId> nb = net_.neighbors(self_);
  std::vector<NodeId> gone;
  for (NodeId m : faulty_.members())
    if (!std::binary_search(nb.begin(), nb.end(), m)) gone.push_back(m);
  for (NodeId m : gone) faulty_.forget(m);
  for (NodeId n : nb)
    if (neighbors_.count(n) == 0) send_partial_list(n);
  neighbors_ = std::set<NodeId>(nb.begin(), nb.end());
  net_.engine().schedule_after(params_.presence_interval, [this] { sample_presence(); });
}

void AlarmAgent::tick() {
  const std::uint64_t now_epoch = epoch_of(net_.now());
  std::erase_if(pending_,
                [&](const auto& kv) { return now_epoch - kv.first.second >= params_.expiry_epochs; });

  if (params_.role == AlarmRole::honest && params_.corroborate && hooks_.corroborate) {
    std::set<NodeId> asked;
    for (const auto& [key, p] : pending_) {
      if (p.signed_here || asked.count(key.first) != 0 || !net_.in_range(self_, key.first)) continue;
      asked.insert(key.first);
      hooks_.corroborate(key.first);
    }
  }

  if (params_.role == AlarmRole::colluder && params_.badmouth_target && *params_.badmouth_target != self_ &&
      !is_faulty(*params_.badmouth_target)) {
    const Key key{*params_.badmouth_target, now_epoch};
    Pending& p = pending_[key];
    p.agg.suspect = key.first;
    p.agg.epoch = key.second;
    if (!p.signed_here) {
      sign_into(p, (static_cast<std::uint64_t>(self_.value()) << 32) | (1ULL << 31) | ++forged_);
      if (p.agg.complete) {
        const AlarmAggregate done = p.agg;
        if (commit(done)) send_alarm(done, params_.relay_hops, std::nullopt);
      } else {
        send_alarm(p.agg, params_.relay_hops, std::nullopt);
      }
    }
  }
  net_.engine().schedule_after(params_.epoch_length, [this] { tick(); });
}

}  // namespace manet
