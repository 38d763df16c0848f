#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stokes_prox/rng.hpp"

namespace stokes_prox {

/// A linear map given by its action and the action of its adjoint.
struct LinearMap {
  std::size_t input_size = 0;
  std::function<std::vector<double>(std::span<const double>)> apply;
  std::function<std::vector<double>(std::span<const double>)> adjoint;
};

struct PowerEstimate {
  double value = 0.0;            ///< ‖op v‖ for the final unit vector v: a lower bound on ‖op‖
  double relative_change = 0.0;  ///< between the last two estimates
  std::size_t iterations = 0;
};

/// Largest singular value of `op` by power iteration on opᵀop, started from a
/// Gaussian vector drawn from `rng`. Stops when the relative change of the
/// estimate drops below `tol` or after `iterations` steps. A start vector in
/// the null space is redrawn up to 3 times before giving up.
PowerEstimate norm_power(const LinearMap& op, std::size_t iterations, double tol, RngStream& rng);

}  // namespace stokes_prox
