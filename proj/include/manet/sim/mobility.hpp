#pragma once

#include <optional>

#include "manet/sim/rng.hpp"
#include "manet/sim/types.hpp"

namespace manet {

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

struct Area {
  double width = 2000.0;
  double height = 600.0;

  bool contains(const Position& p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }
};

struct MobilityState {
  Position position;
  Position waypoint;
  double speed = 0.0;  // m/s
  double pause_remaining = 0.0;
};

/// Random waypoint with steady-state speed correction.
///
/// Plain random waypoint draws leg speeds uniformly from (0, vmax]. Slow legs
/// last longer, so the time-averaged speed decays towards zero as the run
/// progresses. Drawing leg speeds with density proportional to v instead
/// makes the time-stationary speed distribution uniform on (0, vmax], which is
/// the distribution the naive model intends, and it holds from t = 0.
class RandomWaypoint {
 public:
  RandomWaypoint(Area area, double max_speed, double pause_time);

  const Area& area() const { return area_; }
  double max_speed() const { return max_speed_; }
  double pause_time() const { return pause_; }
  bool is_static() const { return max_speed_ <= 0.0; }

  Position sample_position(RngStream& rng) const;
  /// Leg speed on (0, max_speed] with density 2v / vmax^2.
  double sample_speed(RngStream& rng) const;

  MobilityState initial_state(RngStream& rng) const;

  /// Moves the node for dt seconds, starting new legs on arrival.
  MobilityState advance(MobilityState state, double dt, RngStream& rng) const;

 private:
  Area area_;
  double max_speed_;
  double pause_;
};

/// Naive leg-speed draw, uniform on (0, vmax]. Kept for comparison only.
double sample_uniform_speed(double max_speed, RngStream& rng);

/// Time-indexed trajectory of one node. Position queries are pure functions of
/// the query time and the node's own random stream, so the order in which the
/// simulator asks for positions never changes where nodes are.
class Trajectory {
 public:
  Trajectory(const RandomWaypoint& model, RngStream rng);
  /// A node that never moves.
  explicit Trajectory(Position fixed);

  Position position_at(SimTime t);
  bool is_static() const { return !model_.has_value(); }

 private:
  void start_leg(double t0, Position from);

  std::optional<RandomWaypoint> model_;
  std::optional<RngStream> rng_;
  Position from_;
  Position to_;
  double leg_start_ = 0.0;  // seconds
  double leg_end_ = 0.0;    // arrival at the waypoint
  double move_end_ = 0.0;   // same as leg_end_ plus pause
};

}  // namespace manet
