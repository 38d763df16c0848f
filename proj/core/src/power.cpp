#include "stokes_prox/power.hpp"

#include <algorithm>
#include <cmath>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

namespace {

bool normalize(std::vector<double>& v) {
  const double norm = std::sqrt(squared_norm(v));
  if (!(norm > 0.0) || !std::isfinite(norm)) return false;
  for (auto& e : v) e /= norm;
  return true;
}

}  // namespace

PowerEstimate norm_power(const LinearMap& op, std::size_t iterations, double tol, RngStream& rng) {
  if (op.input_size == 0 || !op.apply || !op.adjoint) {
    throw ConfigError("norm_power: operator is incomplete");
  }

  std::vector<double> v;
  std::vector<double> image;
  int redraws = 0;
  for (;;) {
    v = gaussian_draws(rng, op.input_size);
    normalize(v);
    image = op.apply(v);
    if (squared_norm(image) > 0.0) break;
    if (++redraws > 3) throw Error("norm_power: start vector stays in the null space");
  }

  PowerEstimate est;
  double previous = std::sqrt(squared_norm(image));
  est.value = previous;
  est.relative_change = 1.0;
  for (std::size_t it = 1; it <= iterations; ++it) {
    auto next = op.adjoint(image);
    if (next.size() != op.input_size) throw DimensionError("norm_power: adjoint output size");
    if (!normalize(next)) break;
    auto next_image = op.apply(next);
    const double value = std::sqrt(squared_norm(next_image));
    est.iterations = it;
    est.relative_change = std::abs(value - previous) / std::max(value, 1e-300);
    // The Rayleigh quotient is monotone in exact arithmetic; keep the best lower bound.
    if (value >= est.value) est.value = value;
    v = std::move(next);
    image = std::move(next_image);
    previous = value;
    if (est.relative_change < tol) break;
  }
  return est;
}

}  // namespace stokes_prox
