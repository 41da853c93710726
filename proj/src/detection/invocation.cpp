#include "manet/detection/invocation.hpp"

#include <algorithm>

namespace manet {

SimTime period_for_budget(double budget_packets, double packet_rate, double min_period_s, double max_period_s) {
  if (packet_rate <= 0.0) throw ConfigError("packet_rate must be > 0");
  if (budget_packets <= 0.0) throw ConfigError("drop budget must be > 0");
  if (min_period_s <= 0.0 || max_period_s < min_period_s) throw ConfigError("invalid detection period bounds");
  return SimTime::from_seconds(std::clamp(budget_packets / packet_rate, min_period_s, max_period_s));
}

SimTime how_often_to_detect(const InvocationPolicy& p) {
  if (p.max_drop_fraction <= 0.0) throw ConfigError("max_drop_fraction must be > 0");
  if (p.max_drop_fraction >= 1.0) return SimTime::from_seconds(p.max_period_s);
  const double budget = p.max_drop_fraction * p.packet_rate * p.qos_window_s;
  return period_for_budget(budget, p.packet_rate, p.min_period_s, p.max_period_s);
}

SimTime scaled_threshold(SimTime base, double churn) {
  return SimTime::from_seconds(base.seconds() * (1.0 + std::max(0.0, churn)));
}

}  // namespace manet
