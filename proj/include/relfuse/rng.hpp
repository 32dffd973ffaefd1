#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace relfuse {

// Seeded generator with derivable sub-streams. The engine is mt19937_64
// (bit-exact per the standard); uniform and normal conversion is done here
// rather than through std distributions so that a given seed produces the
// same values on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent stream; the same (seed, tags) always yields the
  // same stream regardless of draw order elsewhere.
  Rng substream(std::uint64_t tag) const;
  Rng substream(std::initializer_list<std::uint64_t> tags) const;

  std::uint64_t raw();
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean, double sigma);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace relfuse
