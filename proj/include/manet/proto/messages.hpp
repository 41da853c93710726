#pragma once

// Wire messages exchanged between simulated nodes. Every message knows its
// packet class (used by traces and the overhead metric) and an approximate
// on-air size in bytes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "manet/sim/types.hpp"

namespace manet {

enum class PacketKind : std::uint8_t {
  rreq,
  rrep,
  data,
  probe,
  further_probe,
  notify,
  coop_request,
  probe_query,
  probe_reply,
  alarm,
  faulty_list,
  // Non-packet trace records.
  dri_scan,
  verdict,
  roster,
  end,
};

std::string_view to_string(PacketKind kind);
std::optional<PacketKind> parse_packet_kind(std::string_view text);

/// Control packets count towards routing/security overhead. CBR payload is the
/// only data class for metric purposes.
bool is_control(PacketKind kind);

/// One signer's contribution to an alarm.
struct SignedAccusation {
  NodeId accuser;
  std::uint64_t evidence_nonce = 0;
  std::uint64_t token = 0;

  friend bool operator==(const SignedAccusation&, const SignedAccusation&) = default;
};

/// A faulty-list member together with the signatures that convicted it.
struct FaultyProof {
  NodeId member;
  std::uint64_t epoch = 0;
  std::vector<SignedAccusation> signatures;
};

/// Faulty list as carried on the wire (piggybacked or exchanged).
struct FaultyListDigest {
  std::uint64_t version = 0;
  std::vector<FaultyProof> proofs;

  bool empty() const { return proofs.empty(); }
  std::uint32_t wire_bytes() const;
  /// `<version>:<id,id,...>`
  std::string render() const;
};

struct Rreq {
  NodeId origin;
  NodeId target;
  std::uint32_t broadcast_id = 0;
  std::uint32_t hop_count = 0;
  std::uint32_t origin_seq = 0;
  std::uint32_t target_seq_known = 0;
  std::uint8_t ttl = 32;
  /// Set on single-hop route queries issued by the detection protocol. Such
  /// queries are answered but never rebroadcast or used for route learning.
  std::optional<std::uint64_t> probe_nonce;
  std::optional<FaultyListDigest> piggybacked_faulty_list;
};

struct Rrep {
  NodeId origin;
  NodeId target;
  /// Node that generated the reply.
  NodeId replier;
  /// Distance from the transmitting node to the target.
  std::uint32_t hop_count = 0;
  std::uint32_t target_seq = 0;
  SimTime lifetime = SimTime::from_seconds_int(10);
  std::optional<std::uint64_t> probe_nonce;
  std::optional<FaultyListDigest> piggybacked_faulty_list;
};

enum class DataClass : std::uint8_t { cbr, probe, further_probe };

/// Payload-carrying packet routed hop by hop. Detection probes travel in this
/// class too, so a gray hole cannot tell them apart from application data.
struct DataPacket {
  NodeId src;
  NodeId dst;
  std::uint32_t flow_id = 0;
  std::uint32_t seq = 0;
  std::uint32_t payload_bytes = 512;
  std::uint8_t ttl = 32;
  DataClass data_class = DataClass::cbr;
  std::uint64_t nonce = 0;
  std::uint8_t attempt = 0;
  /// First hop chosen by the source instead of the routing table.
  std::optional<NodeId> forced_next_hop;
};

struct CoopDetectRequest {
  std::uint64_t nonce = 0;
  NodeId initiator;
  NodeId suspect;
  /// Nodes visited so far, starting with the initiator. Never contains the suspect.
  std::vector<NodeId> path;
  std::uint8_t hops_left = 0;
};

/// Source-routed control message from a witness back to the initiator.
struct Notification {
  std::uint64_t nonce = 0;
  NodeId witness;
  NodeId initiator;
  std::vector<NodeId> route;  // witness ... initiator
  std::size_t hop_index = 0;  // index of the current holder in route
};

struct ProbeQuery {
  std::uint64_t nonce = 0;
  NodeId initiator;
  NodeId cooperator;
};

struct ProbeQueryReply {
  std::uint64_t nonce = 0;
  NodeId cooperator;
  bool received = false;
};

struct Alarm {
  NodeId suspect;
  std::uint64_t epoch = 0;
  std::vector<SignedAccusation> signatures;
  std::uint8_t hops_left = 0;
};

struct FaultyListUpdate {
  FaultyListDigest list;
};

using Message = std::variant<Rreq, Rrep, DataPacket, CoopDetectRequest, Notification, ProbeQuery, ProbeQueryReply,
                             Alarm, FaultyListUpdate>;

PacketKind kind_of(const Message& msg);
std::uint32_t wire_bytes(const Message& msg);
/// Detection nonce carried by the message, if any.
std::optional<std::uint64_t> nonce_of(const Message& msg);
const FaultyListDigest* piggyback_of(const Message& msg);

}  // namespace manet
