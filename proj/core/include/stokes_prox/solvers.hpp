#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "stokes_prox/measurement.hpp"
#include "stokes_prox/objectives.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// Step-rule, backtracking and stopping parameters shared by all schemes.
struct SolverConfig {
  double beta0 = 1e-2;  ///< initial Lipschitz estimate
  double eta = 1.1;     ///< backtracking growth factor, > 1
  double r = 1e-3;      ///< step-rule balance, > 0
  double gamma = 1.99;  ///< in (0, 2); also the forward-backward step factor
  double s = 2.0;       ///< in [0, 2]
  std::size_t max_outer = 1000;
  std::size_t max_inner = 100;
  double stop_tol = 1e-8;  ///< relative objective change; 0 disables
  std::size_t stop_window = 10;
  double time_budget_s = 0.0;  ///< wall-clock cap; 0 disables
  RegularizerConfig regularizer;
  bool constrained = true;
  std::optional<double> oracle_beta;  ///< required by pd_solve

  /// Throws ParameterError on any invalid scalar.
  void validate() const;
};

struct StepSizes {
  double tau = 0.0;
  double sigma = 0.0;
};

/// τ = (β/γ + r‖D‖^{2−s})⁻¹, σ = r‖D‖^{−s}. Then 1/τ − σ‖D‖² = β/γ >= β/2.
StepSizes step_rule(double beta, double norm_d, const SolverConfig& cfg);

/// Normalized error of one channel against ground truth.
struct ChannelError {
  double value = 0.0;
  bool absolute = false;  ///< truth channel was zero; value is ‖x_ℓ − x̄_ℓ‖²
};

struct TelemetryRecord {
  std::size_t iteration = 0;  ///< t + 1 for the iterate x^{[t+1]}
  double time_s = 0.0;
  double objective = 0.0;
  double fidelity = 0.0;
  double regularizer = 0.0;
  double violation = 0.0;
  std::vector<ChannelError> mse;  ///< empty without ground truth
  double beta = 0.0;              ///< β^{[t+1]}
  std::size_t inner_count = 0;    ///< rejected trials before acceptance
  double tau = 0.0;
  double sigma = 0.0;
  // Terms of the accepted majorant test, kept so it can be re-checked:
  // h_candidate <= h_current + linear_term + beta/2 * distance_sq + slack.
  double h_candidate = 0.0;
  double h_current = 0.0;
  double linear_term = 0.0;
  double distance_sq = 0.0;
};

/// Everything record_telemetry needs about the current iterate.
struct IterateState {
  const ChannelStack& x;
  const DataCube& cube;
  const RegularizerConfig& regularizer;
  std::size_t iteration = 0;
  double time_s = 0.0;
  double beta = 0.0;
  std::size_t inner_count = 0;
  double tau = 0.0;
  double sigma = 0.0;
  std::optional<double> fidelity;  ///< reused when already known
};

/// ‖x_ℓ − x̄_ℓ‖² / ‖x̄_ℓ‖² per channel.
std::vector<ChannelError> normalized_mse(const ChannelStack& x, const ChannelStack& truth);

TelemetryRecord record_telemetry(const IterateState& state, const ChannelStack* truth);

enum class SolverStatus {
  Converged,      ///< stop_tol satisfied over stop_window iterations
  MaxIterations,  ///< max_outer reached
  TimeBudget,     ///< time_budget_s exhausted
};

struct SolveOptions {
  const ChannelStack* truth = nullptr;
  bool record_wall_time = true;  ///< false writes 0 into time_s (bit-reproducible telemetry)
  std::function<void(const TelemetryRecord&)> on_record;
  std::size_t snapshot_period = 0;
  std::function<void(std::size_t, const ChannelStack&)> on_snapshot;
};

struct SolveResult {
  ChannelStack x;
  DualStack y;
  std::vector<TelemetryRecord> telemetry;
  SolverStatus status = SolverStatus::MaxIterations;
  std::size_t iterations = 0;
  std::size_t total_rejections = 0;
  double final_beta = 0.0;
  double wall_time_s = 0.0;
};

/// Absolute slack added to every majorant test: 1e-12·max(1, |h(x)|).
double majorant_slack(double h_current);

/// Condat–Vũ primal-dual iterations with fixed steps from step_rule(oracle_beta).
/// TV only. Throws DivergenceError on a non-finite iterate.
SolveResult pd_solve(const ChannelStack& x0, const DualStack& y0, const DataCube& cube,
                     const SolverConfig& cfg, const SolveOptions& options = {});

/// Primal-dual iterations whose Lipschitz estimate grows by η until the
/// quadratic majorant of h holds at the candidate. TV only. Throws
/// BacktrackingStallError after max_inner rejections in one outer step.
SolveResult pdwb_solve(const ChannelStack& x0, const DualStack& y0, const DataCube& cube,
                       const SolverConfig& cfg, const SolveOptions& options = {});

/// Forward-backward with backtracking on f = h + hyperbolic TV, step γ/β,
/// projecting onto the cone when cfg.constrained. TVH only.
SolveResult fbwb_solve(const ChannelStack& x0, const DataCube& cube, const SolverConfig& cfg,
                       const SolveOptions& options = {});

}  // namespace stokes_prox
