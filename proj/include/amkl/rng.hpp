#pragma once

#include <array>
#include <cstdint>

#include "amkl/matrix.hpp"

namespace amkl {

/// Seeded xoshiro256++ generator. The generator is fully specified by the
/// output vectors in tests/test_rng.cpp, so traces produced from a seed are
/// identical on every platform. Single-owner: not safe to share across
/// threads.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1) with 53 random bits.
  double next_uniform();

  /// Standard normal via the Box-Muller transform (pairs are cached).
  double next_gaussian();

 private:
  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// rows x cols matrix with i.i.d. normal(0, scale^2) entries, filled in
/// row-major order. scale must be >= 0; scale == 0 yields the zero matrix.
Matrix gaussian_fill(RandomSource& rng, int rows, int cols, double scale);

}  // namespace amkl
