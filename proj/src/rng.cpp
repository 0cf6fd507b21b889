#include "trisieve/rng.hpp"

#include <cmath>

#include "trisieve/numerics.hpp"

namespace trisieve {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  splitmix64(t);
  return splitmix64(t);
}

RngStream::RngStream(std::uint64_t seed) {
  std::uint64_t s = seed;
  engine_.seed(splitmix64(s));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) : RngStream(derive_seed(seed, index)) {}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return numerics::norm_quantile(uniform()); }

double RngStream::exponential() { return -std::log1p(-uniform()); }

}  // namespace trisieve
