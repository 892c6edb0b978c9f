#pragma once

#include <cstdint>
#include <random>

namespace holodisc {

/// Seeded generator with a platform-independent uniform draw (the standard
/// distributions are implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace holodisc
