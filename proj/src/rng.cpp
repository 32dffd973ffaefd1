#include "relfuse/rng.hpp"

#include <cmath>

namespace relfuse {
namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::substream(std::uint64_t tag) const {
  return Rng(mix(seed_ ^ mix(tag + 0xA0761D6478BD642Full)));
}

Rng Rng::substream(std::initializer_list<std::uint64_t> tags) const {
  std::uint64_t derived = seed_;
  for (std::uint64_t tag : tags) {
    derived = mix(derived ^ mix(tag + 0xA0761D6478BD642Full));
  }
  return Rng(derived);
}

std::uint64_t Rng::raw() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal(double mean, double sigma) {
  // Box-Muller; the sine partner is discarded to keep calls stateless.
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * radius * std::cos(2.0 * M_PI * u2);
}

}  // namespace relfuse
