#include "manet/sim/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

RandomWaypoint::RandomWaypoint(Area area, double max_speed, double pause_time)
    : area_(area), max_speed_(max_speed), pause_(pause_time) {}

Position RandomWaypoint::sample_position(RngStream& rng) const {
  const double x = rng.uniform(0.0, area_.width);
  const double y = rng.uniform(0.0, area_.height);
  return {x, y};
}

double RandomWaypoint::sample_speed(RngStream& rng) const {
  if (is_static()) return 0.0;
  // Inverse CDF of f(v) = 2v / vmax^2 on (0, vmax].
  return max_speed_ * std::sqrt(rng.uniform_open_closed());
}

double sample_uniform_speed(double max_speed, RngStream& rng) { return max_speed * rng.uniform_open_closed(); }

MobilityState RandomWaypoint::initial_state(RngStream& rng) const {
  MobilityState s;
  s.position = sample_position(rng);
  if (is_static()) {
    s.waypoint = s.position;
    return s;
  }
  s.waypoint = sample_position(rng);
  s.speed = sample_speed(rng);
  return s;
}

MobilityState RandomWaypoint::advance(MobilityState state, double dt, RngStream& rng) const {
  if (is_static() || dt <= 0.0) return state;
  double remaining = dt;
  while (remaining > 0.0) {
    if (state.pause_remaining > 0.0) {
      const double p = std::min(state.pause_remaining, remaining);
      state.pause_remaining -= p;
      remaining -= p;
      continue;
    }
    const double to_go = distance(state.position, state.waypoint);
    const double reach = state.speed * remaining;
    if (reach < to_go) {
      const double f = reach / to_go;
      state.position.x += (state.waypoint.x - state.position.x) * f;
      state.position.y += (state.waypoint.y - state.position.y) * f;
      remaining = 0.0;
    } else {
      remaining -= to_go / state.speed;
      state.position = state.waypoint;
      state.waypoint = sample_position(rng);
      state.speed = sample_speed(rng);
      state.pause_remaining = pause_;
    }
  }
  return state;
}

Trajectory::Trajectory(const RandomWaypoint& model, RngStream rng) : model_(model), rng_(std::move(rng)) {
  const MobilityState s = model_->initial_state(*rng_);
  from_ = s.position;
  if (model_->is_static()) {
    to_ = from_;
    leg_end_ = move_end_ = INFINITY;
    return;
  }
  to_ = s.waypoint;
  const double len = distance(from_, to_);
  leg_start_ = 0.0;
  leg_end_ = len / s.speed;
  move_end_ = leg_end_ + model_->pause_time();
}

Trajectory::Trajectory(Position fixed) : from_(fixed), to_(fixed), leg_end_(INFINITY), move_end_(INFINITY) {}

void Trajectory::start_leg(double t0, Position from) {
  from_ = from;
  to_ = model_->sample_position(*rng_);
  const double v = model_->sample_speed(*rng_);
  leg_start_ = t0;
  leg_end_ = t0 + distance(from_, to_) / v;
  move_end_ = leg_end_ + model_->pause_time();
}

Position Trajectory::position_at(SimTime t) {
  const double now = t.seconds();
  while (now >= move_end_) start_leg(move_end_, to_);
  if (now >= leg_end_) return to_;
  const double span = leg_end_ - leg_start_;
  const double f = span > 0.0 ? (now - leg_start_) / span : 1.0;
  return {from_.x + (to_.x - from_.x) * f, from_.y + (to_.y - from_.y) * f};
}

}  // namespace manet
