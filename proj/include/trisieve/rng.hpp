#pragma once

#include <cstdint>
#include <random>

namespace trisieve {

/// One SplitMix64 step; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for sub-stream `index` of a run seeded with `seed`. Distinct indices
/// give statistically independent mt19937_64 streams, so a task's draws do
/// not depend on which worker runs it.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  RngStream(std::uint64_t seed, std::uint64_t index);

  /// Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform();
  /// Standard normal by inversion of the uniform draw.
  double normal();
  /// Exp(1) as -log(1 - u).
  double exponential();
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trisieve
