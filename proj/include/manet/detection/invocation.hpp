#pragma once

#include "manet/sim/types.hpp"

namespace manet {

/// Inputs for choosing how often detection runs. In the worst case a gray
/// hole drops everything between two invocations, so the period is bounded by
/// the number of packets the application can afford to lose per window.
struct InvocationPolicy {
  double max_drop_fraction = 0.1;  // d_max
  double packet_rate = 2.0;        // packets/s per flow
  double qos_window_s = 100.0;
  double min_period_s = 1.0;
  double max_period_s = 60.0;
};

/// T = budget / r with budget = d_max * r * window, clamped to
/// [min_period, max_period]. Throws ConfigError when d_max <= 0.
SimTime how_often_to_detect(const InvocationPolicy& policy);

/// Same rule stated directly in packets: T = budget / r, clamped.
SimTime period_for_budget(double budget_packets, double packet_rate, double min_period_s, double max_period_s);

/// Threshold interval stretched by observed churn: base * (1 + churn), where
/// churn is neighbor arrivals plus departures per neighbor per base interval.
SimTime scaled_threshold(SimTime base, double churn);

}  // namespace manet
