#pragma once

#include <cstdint>
#include <random>

namespace cvsel {

// Deterministic stream derivation: replication streams are a pure function of
// (master seed, n, replication index), so serial and parallel runs agree.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// mt19937_64 is fully pinned by the standard; the variate transforms are
// hand-rolled because std::*_distribution output is implementation-defined and
// reports must reproduce bit-for-bit wherever the same binary runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller, one spare cached.
  double normal();

  // Mean 1/rate.
  double exponential(double rate = 1.0);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cvsel
