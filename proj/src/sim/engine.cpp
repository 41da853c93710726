#include "manet/sim/engine.hpp"

#include <string>

namespace manet {

void Engine::schedule(SimTime at, Action action) {
  if (at < now_) {
    throw EngineError("event scheduled in the past: t=" + format_time(at) + " clock=" + format_time(now_));
  }
  queue_.push(Event{at, next_seq_++, std::move(action)});
}

void Engine::run_until(SimTime end) {
  while (!queue_.empty() && queue_.top().fire_at <= end) {
    // priority_queue::top is const; the action is moved out before pop.
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.fire_at;
    ++processed_;
    ev.action();
  }
  if (end > now_) now_ = end;
}

}  // namespace manet
