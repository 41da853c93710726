#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "manet/sim/types.hpp"

namespace manet {

/// Single-threaded discrete-event loop. Events firing at the same instant run
/// in the order they were scheduled.
class Engine {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  /// Throws EngineError when `at` lies in the past.
  void schedule(SimTime at, Action action);
  void schedule_after(SimTime delay, Action action) { schedule(now_ + delay, std::move(action)); }

  /// Processes every event with fire time <= end, then sets the clock to end.
  void run_until(SimTime end);

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t processed() const { return processed_; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace manet
