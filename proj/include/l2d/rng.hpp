#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace l2d {

// Deterministic RNG used throughout. mt19937_64 output is fully specified by
// the standard; the helpers below avoid std::*_distribution, whose mapping is
// implementation-defined, so streams reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  uint64_t uniform_int(uint64_t n) {
    const uint64_t rem = UINT64_MAX % n;
    const uint64_t lim = UINT64_MAX - rem;  // multiple of n
    uint64_t x = next_u64();
    while (x >= lim) x = next_u64();
    return x % n;
  }

  // Standard normal via Box-Muller; two uniforms per value, no cached spare.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Independent substream keyed on (original seed, stream id). Forking does
  // not depend on how much of this stream has been consumed.
  Rng fork(uint64_t stream) const { return Rng(mix(seed_, stream)); }

  uint64_t seed() const { return seed_; }

 private:
  // splitmix64 finalizer over the combined key
  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace l2d
