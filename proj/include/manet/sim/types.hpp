#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace manet {

/// Node identifier. Zero is reserved to mean "no node" in wire and trace
/// formats, so a valid NodeId is always >= 1.
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool valid() const { return value_ != 0; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;

 private:
  std::uint32_t value_ = 0;
};

inline std::string to_string(NodeId id) { return std::to_string(id.value()); }

/// Virtual clock value in integer nanoseconds. Queue ordering never touches
/// floating point, so identical inputs replay identically on any platform.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_nanos(std::int64_t ns) { return SimTime(ns); }
  static constexpr SimTime from_millis(std::int64_t ms) { return SimTime(ms * 1'000'000); }
  static constexpr SimTime from_seconds_int(std::int64_t s) { return SimTime(s * 1'000'000'000); }
  /// Rounds to the nearest nanosecond.
  static SimTime from_seconds(double s);
  static constexpr SimTime max() { return SimTime(std::numeric_limits<std::int64_t>::max()); }

  constexpr std::int64_t nanos() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

  friend constexpr auto operator<=>(SimTime, SimTime) = default;
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ns_ + b.ns_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.ns_ - b.ns_); }
  friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime(a.ns_ * k); }
  constexpr SimTime& operator+=(SimTime o) {
    ns_ += o.ns_;
    return *this;
  }

 private:
  constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

/// Fixed "seconds.nanoseconds" rendering used by traces.
std::string format_time(SimTime t);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EngineError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace manet

template <>
struct std::hash<manet::NodeId> {
  std::size_t operator()(manet::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value()); }
};
