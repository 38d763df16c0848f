#include "stokes_prox/rng.hpp"

#include <cmath>
#include <numbers>

namespace stokes_prox {

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::vector<double> gaussian_draws(RngStream& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = rng.gaussian();
  return out;
}

std::vector<double> uniform_draws(RngStream& rng, std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (auto& v : out) v = rng.uniform(lo, hi);
  return out;
}

}  // namespace stokes_prox
