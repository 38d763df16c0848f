#pragma once

#include <vector>

#include "stokes_prox/measurement.hpp"
#include "stokes_prox/power.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

enum class Regularizer { TV, TVH };

/// Per-component weights and the hyperbolic smoothing level.
struct RegularizerConfig {
  std::vector<double> lambda;  ///< λ_ℓ >= 0, one per component
  double epsilon = 1e-2;       ///< > 0, used by TVH only
  Regularizer variant = Regularizer::TV;

  void validate(std::size_t components) const;
};

/// Σ_k ½‖d_k − M_k x‖²_{W_k}.
double fidelity_value(const ChannelStack& x, const DataCube& cube);

/// Σ_k M_kᵀ W_k (M_k x − d_k).
ChannelStack fidelity_grad(const ChannelStack& x, const DataCube& cube);

/// Value and gradient of the fidelity sharing one forward pass.
struct FidelityEval {
  double value = 0.0;
  ChannelStack gradient;
};
FidelityEval fidelity_value_and_grad(const ChannelStack& x, const DataCube& cube);

/// Power-iteration estimate of ‖Σ_k M_kᵀ W_k M_k‖, the Lipschitz constant of
/// the fidelity gradient.
double fidelity_lipschitz(const DataCube& cube, RngStream& rng, std::size_t iterations = 1000,
                          double tol = 1e-13);

/// Anisotropic total variation Σ_ℓ λ_ℓ Σ (|dx| + |dy|). Requires variant TV.
double tv_value(const ChannelStack& x, const RegularizerConfig& cfg);

/// Pixelwise hyperbolic TV Σ_ℓ λ_ℓ Σ_n (√(dx² + dy² + ε²) − ε). Requires ε > 0.
double tvh_value(const ChannelStack& x, const RegularizerConfig& cfg);

/// Gradient of tvh_value.
ChannelStack tvh_grad(const ChannelStack& x, const RegularizerConfig& cfg);

/// Value of whichever variant cfg selects.
double regularizer_value(const ChannelStack& x, const RegularizerConfig& cfg);

/// max over pixels of max(0, ‖(x₂…x_L)[n]‖ − x₁[n]); 0 when L < 2.
double feasibility_violation(const ChannelStack& x);

struct ObjectiveReport {
  double fidelity = 0.0;
  double regularizer = 0.0;
  double total = 0.0;  ///< fidelity + regularizer; the indicator is never added
  double feasibility_violation = 0.0;
  bool infeasible = false;  ///< constrained and violation > 1e-9·max(1, ‖x‖∞)
};

ObjectiveReport objective_report(const ChannelStack& x, const DataCube& cube,
                                 const RegularizerConfig& cfg, bool constrained);

}  // namespace stokes_prox
