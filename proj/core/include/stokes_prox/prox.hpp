#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// prox_{t·g}(v) for a fixed function g: (v, t) -> argmin_u t·g(u) + ½‖u − v‖².
using ProxOracle = std::function<std::vector<double>(std::span<const double>, double)>;

/// Componentwise sign(v)·max(|v| − t, 0). Throws ParameterError for t < 0.
std::vector<double> soft_threshold(std::span<const double> v, double t);

/// prox_{σ g*}(y) = y − σ·prox_{g/σ}(y/σ) (Moreau decomposition).
std::vector<double> prox_conjugate(std::span<const double> y, double sigma, const ProxOracle& prox_g);

/// Clamp every entry to [−λ, λ]: prox of the conjugate of λ‖·‖₁ for any step.
std::vector<double> project_linf_ball(std::span<const double> y, double lambda);
void project_linf_ball_inplace(std::span<double> y, double lambda);

/// Oracle for g = λ‖·‖₁: (v, t) -> soft_threshold(v, t·λ).
ProxOracle l1_prox(double lambda);

/// One pixel of the epigraph constraint: intensity t and polarized part z.
struct ConeSlice {
  double t = 0.0;
  std::vector<double> z;
};

/// Euclidean projection onto the second-order cone {(t, z) : ‖z‖₂ <= t}.
ConeSlice project_soc(const ConeSlice& slice);

/// Per-pixel cone projection with t = x₁[n] and z = (x₂[n], …, x_L[n]).
/// Feasible pixels are left untouched. Throws ConfigError when L < 2.
ChannelStack project_soc_stack(const ChannelStack& x);
void project_soc_stack_inplace(ChannelStack& x);

}  // namespace stokes_prox
