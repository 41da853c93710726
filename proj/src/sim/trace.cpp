#include "manet/sim/trace.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include "manet/sim/rng.hpp"

namespace manet {
namespace {

constexpr std::array<std::pair<Outcome, std::string_view>, 22> kOutcomeNames{{
    {Outcome::delivered, "delivered"},
    {Outcome::lost_channel, "lost_channel"},
    {Outcome::dropped_buffer, "dropped_buffer"},
    {Outcome::out_of_range, "out_of_range"},
    {Outcome::originated, "originated"},
    {Outcome::received, "received"},
    {Outcome::malicious_drop, "malicious_drop"},
    {Outcome::ttl_expired, "ttl_expired"},
    {Outcome::no_route, "no_route"},
    {Outcome::buffer_overflow, "buffer_overflow"},
    {Outcome::suspect, "suspect"},
    {Outcome::cleared, "cleared"},
    {Outcome::escalate, "escalate"},
    {Outcome::malicious, "malicious"},
    {Outcome::not_confirmed, "not_confirmed"},
    {Outcome::no_rrep, "no_rrep"},
    {Outcome::unreachable_cn, "unreachable_cn"},
    {Outcome::insufficient_witnesses, "insufficient_witnesses"},
    {Outcome::commit, "commit"},
    {Outcome::honest, "honest"},
    {Outcome::adversary, "adversary"},
    {Outcome::complete, "complete"},
}};

template <typename T>
T parse_number(std::string_view text, std::string_view field) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("bad numeric field " + std::string(field));
  return value;
}

SimTime parse_time(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return SimTime::from_seconds_int(parse_number<std::int64_t>(text, "t"));
  const auto whole = parse_number<std::int64_t>(text.substr(0, dot), "t");
  std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 9) throw std::invalid_argument("bad time fraction");
  std::int64_t ns = parse_number<std::int64_t>(frac, "t");
  for (std::size_t i = frac.size(); i < 9; ++i) ns *= 10;
  return SimTime::from_nanos(whole * 1'000'000'000 + ns);
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  for (const auto& [o, name] : kOutcomeNames) {
    if (o == outcome) return name;
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (const auto& [o, name] : kOutcomeNames) {
    if (name == text) return o;
  }
  return std::nullopt;
}

bool is_link_outcome(Outcome outcome) {
  return outcome == Outcome::delivered || outcome == Outcome::lost_channel || outcome == Outcome::dropped_buffer ||
         outcome == Outcome::out_of_range;
}

std::string format_record(const TraceRecord& r) {
  std::string line;
  line.reserve(96);
  line += "t=";
  line += format_time(r.t);
  line += " kind=";
  line += to_string(r.kind);
  line += " src=";
  line += std::to_string(r.src);
  line += " dst=";
  line += std::to_string(r.dst);
  line += " outcome=";
  line += to_string(r.outcome);
  line += " bytes=";
  line += std::to_string(r.bytes);
  if (r.nonce) {
    line += " nonce=";
    line += std::to_string(*r.nonce);
  }
  if (r.faulty_list) {
    line += " fl=";
    line += *r.faulty_list;
  }
  return line;
}

TraceRecord parse_record(std::string_view line) {
  TraceRecord r;
  unsigned seen = 0;
  while (!line.empty()) {
    const auto sp = line.find(' ');
    std::string_view tok = line.substr(0, sp);
    line = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("token without '=': " + std::string(tok));
    const std::string_view key = tok.substr(0, eq);
    const std::string_view val = tok.substr(eq + 1);
    if (key == "t") {
      r.t = parse_time(val);
      seen |= 1;
    } else if (key == "kind") {
      const auto k = parse_packet_kind(val);
      if (!k) throw std::invalid_argument("unknown kind " + std::string(val));
      r.kind = *k;
      seen |= 2;
    } else if (key == "src") {
      r.src = parse_number<std::uint32_t>(val, key);
      seen |= 4;
    } else if (key == "dst") {
      r.dst = parse_number<std::uint32_t>(val, key);
      seen |= 8;
    } else if (key == "outcome") {
      const auto o = parse_outcome(val);
      if (!o) throw std::invalid_argument("unknown outcome " + std::string(val));
      r.outcome = *o;
      seen |= 16;
    } else if (key == "bytes") {
      r.bytes = parse_number<std::uint32_t>(val, key);
      seen |= 32;
    } else if (key == "nonce") {
      r.nonce = parse_number<std::uint64_t>(val, key);
    } else if (key == "fl") {
      r.faulty_list = std::string(val);
    } else {
      throw std::invalid_argument("unknown field " + std::string(key));
    }
  }
  if (seen != 63) throw std::invalid_argument("trace record missing a required field");
  return r;
}

void TextTraceWriter::record(const TraceRecord& record) {
  out_ << format_record(record) << '\n';
}

void TraceDigest::record(const TraceRecord& record) {
  hash_ = fnv1a64(format_record(record), hash_);
  hash_ = fnv1a64("\n", hash_);
  ++count_;
}

}  // namespace manet
