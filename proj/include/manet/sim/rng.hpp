#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace manet {

/// One independent pseudo-random stream per stochastic concern. The stream is
/// derived from (seed, label) so adding or removing consumers of one stream
/// never shifts the values another stream produces.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform01(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p);
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace manet
