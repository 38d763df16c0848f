#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace stokes_prox {

/// Deterministic random stream.
///
/// Uniform bits come from std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Normal deviates use the Box-Muller transform on pairs of
/// 53-bit uniforms; the cosine branch is returned first and the sine branch is
/// cached for the next call. Equal seeds therefore give equal sequences on any
/// conforming platform (up to libm rounding of log/sqrt/cos/sin).
///
/// A stream is single-owner. Parallel consumers derive independent substreams
/// with `substream(index)`, seeded as `seed ^ index`.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal deviate.
  double gaussian();

  RngStream substream(std::uint64_t index) const { return RngStream(seed_ ^ index); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// n standard-normal draws taken in order from `rng`.
std::vector<double> gaussian_draws(RngStream& rng, std::size_t n);

/// n uniform draws in [lo, hi).
std::vector<double> uniform_draws(RngStream& rng, std::size_t n, double lo = -1.0,
                                  double hi = 1.0);

}  // namespace stokes_prox
