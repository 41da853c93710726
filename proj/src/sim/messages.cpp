#include "manet/proto/messages.hpp"

#include <array>

namespace manet {
namespace {

constexpr std::array<std::pair<PacketKind, std::string_view>, 15> kKindNames{{
    {PacketKind::rreq, "rreq"},
    {PacketKind::rrep, "rrep"},
    {PacketKind::data, "data"},
    {PacketKind::probe, "probe"},
    {PacketKind::further_probe, "further_probe"},
    {PacketKind::notify, "notify"},
    {PacketKind::coop_request, "coop_request"},
    {PacketKind::probe_query, "probe_query"},
    {PacketKind::probe_reply, "probe_reply"},
    {PacketKind::alarm, "alarm"},
    {PacketKind::faulty_list, "faulty_list"},
    {PacketKind::dri_scan, "dri_scan"},
    {PacketKind::verdict, "verdict"},
    {PacketKind::roster, "roster"},
    {PacketKind::end, "end"},
}};

// Header sizes are rough AODV/UDP/IP figures; only relative magnitudes matter.
constexpr std::uint32_t kIpUdpHeader = 28;
constexpr std::uint32_t kSignatureBytes = 12;

}  // namespace

std::string_view to_string(PacketKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<PacketKind> parse_packet_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool is_control(PacketKind kind) {
  switch (kind) {
    case PacketKind::rreq:
    case PacketKind::rrep:
    case PacketKind::probe:
    case PacketKind::further_probe:
    case PacketKind::notify:
    case PacketKind::coop_request:
    case PacketKind::probe_query:
    case PacketKind::probe_reply:
    case PacketKind::alarm:
    case PacketKind::faulty_list:
      return true;
    default:
      return false;
  }
}

std::uint32_t FaultyListDigest::wire_bytes() const {
  std::uint32_t bytes = 8;
  for (const auto& p : proofs) bytes += 12 + kSignatureBytes * static_cast<std::uint32_t>(p.signatures.size());
  return bytes;
}

std::string FaultyListDigest::render() const {
  std::string out = std::to_string(version) + ":";
  for (std::size_t i = 0; i < proofs.size(); ++i) {
    if (i != 0) out += ',';
    out += to_string(proofs[i].member);
  }
  return out;
}

namespace {

struct KindVisitor {
  PacketKind operator()(const Rreq&) const { return PacketKind::rreq; }
  PacketKind operator()(const Rrep&) const { return PacketKind::rrep; }
  PacketKind operator()(const DataPacket& p) const {
    switch (p.data_class) {
      case DataClass::probe:
        return PacketKind::probe;
      case DataClass::further_probe:
        return PacketKind::further_probe;
      case DataClass::cbr:
        break;
    }
    return PacketKind::data;
  }
  PacketKind operator()(const CoopDetectRequest&) const { return PacketKind::coop_request; }
  PacketKind operator()(const Notification&) const { return PacketKind::notify; }
  PacketKind operator()(const ProbeQuery&) const { return PacketKind::probe_query; }
  PacketKind operator()(const ProbeQueryReply&) const { return PacketKind::probe_reply; }
  PacketKind operator()(const Alarm&) const { return PacketKind::alarm; }
  PacketKind operator()(const FaultyListUpdate&) const { return PacketKind::faulty_list; }
};

std::uint32_t piggy_bytes(const std::optional<FaultyListDigest>& fl) { return fl ? fl->wire_bytes() : 0; }

struct BytesVisitor {
  std::uint32_t operator()(const Rreq& m) const { return kIpUdpHeader + 24 + piggy_bytes(m.piggybacked_faulty_list); }
  std::uint32_t operator()(const Rrep& m) const { return kIpUdpHeader + 20 + piggy_bytes(m.piggybacked_faulty_list); }
  std::uint32_t operator()(const DataPacket& p) const { return kIpUdpHeader + p.payload_bytes; }
  std::uint32_t operator()(const CoopDetectRequest& m) const {
    return kIpUdpHeader + 16 + 4 * static_cast<std::uint32_t>(m.path.size());
  }
  std::uint32_t operator()(const Notification& m) const {
    return kIpUdpHeader + 16 + 4 * static_cast<std::uint32_t>(m.route.size());
  }
  std::uint32_t operator()(const ProbeQuery&) const { return kIpUdpHeader + 16; }
  std::uint32_t operator()(const ProbeQueryReply&) const { return kIpUdpHeader + 13; }
  std::uint32_t operator()(const Alarm& m) const {
    return kIpUdpHeader + 16 + kSignatureBytes * static_cast<std::uint32_t>(m.signatures.size());
  }
  std::uint32_t operator()(const FaultyListUpdate& m) const { return kIpUdpHeader + m.list.wire_bytes(); }
};

}  // namespace

PacketKind kind_of(const Message& msg) { return std::visit(KindVisitor{}, msg); }

std::uint32_t wire_bytes(const Message& msg) { return std::visit(BytesVisitor{}, msg); }

std::optional<std::uint64_t> nonce_of(const Message& msg) {
  if (const auto* m = std::get_if<Rreq>(&msg)) return m->probe_nonce;
  if (const auto* m = std::get_if<Rrep>(&msg)) return m->probe_nonce;
  if (const auto* m = std::get_if<DataPacket>(&msg)) {
    if (m->data_class != DataClass::cbr) return m->nonce;
    return std::nullopt;
  }
  if (const auto* m = std::get_if<CoopDetectRequest>(&msg)) return m->nonce;
  if (const auto* m = std::get_if<Notification>(&msg)) return m->nonce;
  if (const auto* m = std::get_if<ProbeQuery>(&msg)) return m->nonce;
  if (const auto* m = std::get_if<ProbeQueryReply>(&msg)) return m->nonce;
  return std::nullopt;
}

const FaultyListDigest* piggyback_of(const Message& msg) {
  if (const auto* m = std::get_if<Rreq>(&msg); m && m->piggybacked_faulty_list) return &*m->piggybacked_faulty_list;
  if (const auto* m = std::get_if<Rrep>(&msg); m && m->piggybacked_faulty_list) return &*m->piggybacked_faulty_list;
  return nullptr;
}

}  // namespace manet
