#pragma once

#include <cstdint>
#include <random>

#include "sparsemusic/types.hpp"

namespace sparsemusic {

// Seedable, splittable generator. Every stochastic operation in the library
// takes one of these (or a raw seed) explicitly; children derived with
// split() are reproducible functions of (parent seed, stream id) and do not
// depend on how much the parent has already been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n);
  // Standard normal (Box-Muller, no cached state).
  double normal();
  // Circular complex Gaussian with E|z|^2 = variance.
  cplx complex_normal(double variance);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sparsemusic
