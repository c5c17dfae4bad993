#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tsmc {

/* Seeded generator used everywhere randomness is needed.  Variates are
 * derived from the raw 64-bit stream directly (not through the distribution
 * adaptors of <random>) so a given seed yields the same sequence on every
 * platform. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /* uniform on [0, 1) with 53 random bits */
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /* standard exponential via inversion */
  double exponential() { return -std::log(1.0 - uniform()); }

  /* uniform integer on {0, ..., hi} inclusive */
  int uniform_int(int hi) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(hi + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tsmc
