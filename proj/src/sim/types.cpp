#include "manet/sim/types.hpp"

#include <cmath>
#include <cstdio>

namespace manet {

SimTime SimTime::from_seconds(double s) { return SimTime(static_cast<std::int64_t>(std::llround(s * 1e9))); }

std::string format_time(SimTime t) {
  std::int64_t ns = t.nanos();
  const bool negative = ns < 0;
  if (negative) ns = -ns;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%09lld", negative ? "-" : "", static_cast<long long>(ns / 1'000'000'000),
                static_cast<long long>(ns % 1'000'000'000));
  return buf;
}

}  // namespace manet
