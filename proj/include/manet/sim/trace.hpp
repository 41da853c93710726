#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manet/proto/messages.hpp"
#include "manet/sim/types.hpp"

namespace manet {

/// Terminal outcome of a packet, or the result attached to a non-packet record.
enum class Outcome : std::uint8_t {
  // link level, one per transmission attempt
  delivered,
  lost_channel,
  dropped_buffer,
  out_of_range,
  // end to end
  originated,
  received,
  malicious_drop,
  ttl_expired,
  no_route,
  buffer_overflow,
  // detection and alarm
  suspect,
  cleared,
  escalate,
  malicious,
  not_confirmed,
  no_rrep,
  unreachable_cn,
  insufficient_witnesses,
  commit,
  // roster
  honest,
  adversary,
  // end of trace
  complete,
};

std::string_view to_string(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view text);
bool is_link_outcome(Outcome outcome);

struct TraceRecord {
  SimTime t;
  PacketKind kind = PacketKind::data;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  Outcome outcome = Outcome::delivered;
  std::uint32_t bytes = 0;
  std::optional<std::uint64_t> nonce;
  /// Piggybacked faulty list, rendered as `<version>:<ids>`.
  std::optional<std::string> faulty_list;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// `t=<sec> kind=<class> src=<id> dst=<id> outcome=<enum> bytes=<n>[ nonce=<n>][ fl=<v>:<ids>]`
std::string format_record(const TraceRecord& record);
/// Throws std::invalid_argument on malformed lines.
TraceRecord parse_record(std::string_view line);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceRecord& record) = 0;
};

class TextTraceWriter final : public TraceSink {
 public:
  explicit TextTraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceRecord& record) override;

 private:
  std::ostream& out_;
};

/// FNV-1a digest over the formatted trace text; equal digests mean equal bytes
/// with overwhelming probability and cost no storage.
class TraceDigest final : public TraceSink {
 public:
  void record(const TraceRecord& record) override;
  std::uint64_t value() const { return hash_; }
  std::uint64_t records() const { return count_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  std::uint64_t count_ = 0;
};

class VectorTrace final : public TraceSink {
 public:
  void record(const TraceRecord& record) override { records.push_back(record); }
  std::vector<TraceRecord> records;
};

class TeeTrace final : public TraceSink {
 public:
  void add(TraceSink* sink) {
    if (sink != nullptr) sinks_.push_back(sink);
  }
  void record(const TraceRecord& record) override {
    for (auto* sink : sinks_) sink->record(record);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

}  // namespace manet
