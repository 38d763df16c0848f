#include "stokes_prox/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/gradient.hpp"
#include "stokes_prox/prox.hpp"

namespace stokes_prox {

void SolverConfig::validate() const {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) throw ParameterError("beta0 must be > 0");
  if (!(eta > 1.0) || !std::isfinite(eta)) throw ParameterError("eta must be > 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("r must be > 0");
  if (!(gamma > 0.0 && gamma < 2.0)) throw ParameterError("gamma must lie in (0, 2)");
  if (!(s >= 0.0 && s <= 2.0)) throw ParameterError("s must lie in [0, 2]");
  if (max_inner == 0) throw ParameterError("max_inner must be >= 1");
  if (!(stop_tol >= 0.0)) throw ParameterError("stop_tol must be >= 0");
  if (!(time_budget_s >= 0.0)) throw ParameterError("time_budget_s must be >= 0");
  if (oracle_beta && !(*oracle_beta >= 0.0 && std::isfinite(*oracle_beta))) {
    throw ParameterError("oracle_beta must be finite and >= 0");
  }
}

StepSizes step_rule(double beta, double norm_d, const SolverConfig& cfg) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("step_rule: beta must be >= 0");
  if (!(norm_d > 0.0) || !std::isfinite(norm_d)) throw ParameterError("step_rule: ‖D‖ must be > 0");
  if (!(cfg.r > 0.0)) throw ParameterError("step_rule: r must be > 0");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 2.0)) throw ParameterError("step_rule: gamma must lie in (0, 2)");
  if (!(cfg.s >= 0.0 && cfg.s <= 2.0)) throw ParameterError("step_rule: s must lie in [0, 2]");
  StepSizes st;
  st.sigma = cfg.r * std::pow(norm_d, -cfg.s);
  // σ‖D‖² equals r‖D‖^{2−s}; reusing it makes 1/τ − σ‖D‖² collapse to β/γ.
  st.tau = 1.0 / (beta / cfg.gamma + st.sigma * norm_d * norm_d);
  return st;
}

std::vector<ChannelError> normalized_mse(const ChannelStack& x, const ChannelStack& truth) {
  if (!x.same_layout(truth)) throw DimensionError("normalized_mse: truth layout differs");
  std::vector<ChannelError> out(x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double err = squared_distance(x.plane(c), truth.plane(c));
    const double ref = squared_norm(truth.plane(c));
    if (ref > 0.0) {
      out[c] = {err / ref, false};
    } else {
      out[c] = {err, true};
    }
  }
  return out;
}

TelemetryRecord record_telemetry(const IterateState& state, const ChannelStack* truth) {
  TelemetryRecord rec;
  rec.iteration = state.iteration;
  rec.time_s = state.time_s;
  rec.fidelity = state.fidelity ? *state.fidelity : fidelity_value(state.x, state.cube);
  rec.regularizer = regularizer_value(state.x, state.regularizer);
  rec.objective = rec.fidelity + rec.regularizer;
  rec.violation = feasibility_violation(state.x);
  if (truth) rec.mse = normalized_mse(state.x, *truth);
  rec.beta = state.beta;
  rec.inner_count = state.inner_count;
  rec.tau = state.tau;
  rec.sigma = state.sigma;
  return rec;
}

double majorant_slack(double h_current) { return 1e-12 * std::max(1.0, std::abs(h_current)); }

namespace {

using Clock = std::chrono::steady_clock;

void check_problem(const ChannelStack& x0, const DataCube& cube, const SolverConfig& cfg) {
  cfg.validate();
  cube.validate();
  check_compatible(x0, cube);
  cfg.regularizer.validate(x0.channels());
  if (!x0.all_finite()) throw ParameterError("initial iterate has non-finite values");
  if (cfg.constrained && x0.channels() < 2) {
    throw ConfigError("the epigraph constraint needs at least 2 components");
  }
}

void check_dual(const DualStack& y0, const ChannelStack& x0) {
  if (y0.channels() != x0.channels() || y0.shape() != x0.shape()) {
    throw DimensionError("initial dual variable does not match the primal layout");
  }
}

/// Clock, stopping rule, telemetry fan-out and snapshots shared by the solvers.
class RunMonitor {
 public:
  RunMonitor(const SolverConfig& cfg, const SolveOptions& options, SolveResult& result)
      : cfg_(cfg), options_(options), result_(result), start_(Clock::now()) {}

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double stamp() const { return options_.record_wall_time ? elapsed() : 0.0; }

  /// Emits the record and returns true when the run should stop.
  bool push(TelemetryRecord rec, const ChannelStack& x) {
    const double objective = rec.objective;
    result_.total_rejections += rec.inner_count;
    result_.iterations = rec.iteration;
    if (options_.on_record) options_.on_record(rec);
    result_.telemetry.push_back(std::move(rec));
    if (options_.snapshot_period > 0 && options_.on_snapshot &&
        result_.iterations % options_.snapshot_period == 0) {
      options_.on_snapshot(result_.iterations, x);
    }

    if (previous_) {
      const double change = std::abs(objective - *previous_) / std::max(std::abs(*previous_), 1e-300);
      streak_ = (cfg_.stop_tol > 0.0 && change < cfg_.stop_tol) ? streak_ + 1 : 0;
    }
    previous_ = objective;
    if (cfg_.stop_tol > 0.0 && streak_ >= std::max<std::size_t>(cfg_.stop_window, 1)) {
      result_.status = SolverStatus::Converged;
      return true;
    }
    if (result_.iterations >= cfg_.max_outer) {
      result_.status = SolverStatus::MaxIterations;
      return true;
    }
    if (cfg_.time_budget_s > 0.0 && elapsed() >= cfg_.time_budget_s) {
      result_.status = SolverStatus::TimeBudget;
      return true;
    }
    return false;
  }

  void finish() { result_.wall_time_s = elapsed(); }

 private:
  const SolverConfig& cfg_;
  const SolveOptions& options_;
  SolveResult& result_;
  Clock::time_point start_;
  std::optional<double> previous_;
  std::size_t streak_ = 0;
};

void require_finite(const ChannelStack& x, double value, std::size_t iteration) {
  if (!std::isfinite(value) || !x.all_finite()) {
    throw DivergenceError(iteration, "non-finite primal iterate or objective");
  }
}

/// x − τ (g + Dᵀy), projected onto C when constrained.
void primal_step(const ChannelStack& x, const ChannelStack& direction, double tau, bool constrained,
                 ChannelStack& out) {
  out = x;
  axpy(-tau, direction.values(), out.values());
  if (constrained) project_soc_stack_inplace(out);
}

/// y + σ D(2x⁺ − x), clamped block-wise to [−λ_ℓ, λ_ℓ].
void dual_step(const DualStack& y, const ChannelStack& x_next, const ChannelStack& x,
               double sigma, const std::vector<double>& lambda, DualStack& out) {
  ChannelStack extrapolated = x_next;
  auto e = extrapolated.values();
  const auto xv = x.values();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 2.0 * e[i] - xv[i];
  grad_forward(extrapolated, out);
  auto o = out.values();
  const auto yv = y.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = yv[i] + sigma * o[i];
  for (std::size_t c = 0; c < out.channels(); ++c) project_linf_ball_inplace(out.block(c), lambda[c]);
}

ChannelStack sum_stacks(const ChannelStack& a, const ChannelStack& b) {
  ChannelStack out = a;
  axpy(1.0, b.values(), out.values());
  return out;
}

}  // namespace

SolveResult pd_solve(const ChannelStack& x0, const DualStack& y0, const DataCube& cube,
                     const SolverConfig& cfg, const SolveOptions& options) {
  check_problem(x0, cube, cfg);
  check_dual(y0, x0);
  if (cfg.regularizer.variant != Regularizer::TV) {
    throw ConfigError("pd_solve handles the TV regularizer; use fbwb_solve for hyperbolic TV");
  }
  if (!cfg.oracle_beta) throw ConfigError("pd_solve requires oracle_beta");

  const double beta = *cfg.oracle_beta;
  const StepSizes st = step_rule(beta, gradient_norm(cube.shape), cfg);

  SolveResult result;
  result.x = x0;
  result.y = y0;
  result.final_beta = beta;
  RunMonitor monitor(cfg, options, result);

  ChannelStack dty;
  ChannelStack x_next;
  DualStack y_next(y0.channels(), y0.shape());
  auto current = fidelity_value_and_grad(result.x, cube);
  require_finite(result.x, current.value, 0);

  for (std::size_t t = 0; t < cfg.max_outer; ++t) {
    grad_adjoint(result.y, dty);
    primal_step(result.x, sum_stacks(current.gradient, dty), st.tau, cfg.constrained, x_next);
    dual_step(result.y, x_next, result.x, st.sigma, cfg.regularizer.lambda, y_next);

    auto next = fidelity_value_and_grad(x_next, cube);
    require_finite(x_next, next.value, t + 1);

    TelemetryRecord rec = record_telemetry(
        IterateState{x_next, cube, cfg.regularizer, t + 1, monitor.stamp(), beta, 0, st.tau,
                     st.sigma, next.value},
        options.truth);
    rec.h_candidate = next.value;
    rec.h_current = current.value;
    rec.linear_term = dot(current.gradient.values(), x_next.values()) -
                      dot(current.gradient.values(), result.x.values());
    rec.distance_sq = squared_distance(x_next.values(), result.x.values());

    std::swap(result.x, x_next);
    std::swap(result.y, y_next);
    current = std::move(next);
    if (monitor.push(std::move(rec), result.x)) break;
  }
  monitor.finish();
  return result;
}

SolveResult pdwb_solve(const ChannelStack& x0, const DualStack& y0, const DataCube& cube,
                       const SolverConfig& cfg, const SolveOptions& options) {
  check_problem(x0, cube, cfg);
  check_dual(y0, x0);
  if (cfg.regularizer.variant != Regularizer::TV) {
    throw ConfigError("pdwb_solve handles the TV regularizer; use fbwb_solve for hyperbolic TV");
  }

  const double norm_d = gradient_norm(cube.shape);
  SolveResult result;
  result.x = x0;
  result.y = y0;
  RunMonitor monitor(cfg, options, result);

  double beta = cfg.beta0;
  ChannelStack dty;
  ChannelStack candidate;
  ChannelStack diff;
  DualStack y_next(y0.channels(), y0.shape());
  auto current = fidelity_value_and_grad(result.x, cube);
  require_finite(result.x, current.value, 0);

  for (std::size_t t = 0; t < cfg.max_outer; ++t) {
    grad_adjoint(result.y, dty);
    const ChannelStack direction = sum_stacks(current.gradient, dty);
    const double slack = majorant_slack(current.value);

    std::size_t inner = 0;
    double trial_beta = beta;
    StepSizes st;
    double h_candidate = 0.0;
    double linear = 0.0;
    double dist2 = 0.0;
    for (;; ++inner) {
      trial_beta = beta * std::pow(cfg.eta, static_cast<double>(inner));
      st = step_rule(trial_beta, norm_d, cfg);
      primal_step(result.x, direction, st.tau, cfg.constrained, candidate);
      h_candidate = fidelity_value(candidate, cube);
      diff = candidate;
      axpy(-1.0, result.x.values(), diff.values());
      linear = dot(diff.values(), current.gradient.values());
      dist2 = squared_norm(diff.values());
      const double majorant = current.value + linear + 0.5 * trial_beta * dist2;
      // Accept once the quadratic model majorizes h at the candidate.
      if (h_candidate <= majorant + slack) break;
      if (inner + 1 >= cfg.max_inner) {
        throw BacktrackingStallError(t, h_candidate, majorant, trial_beta);
      }
    }

    dual_step(result.y, candidate, result.x, st.sigma, cfg.regularizer.lambda, y_next);
    beta = trial_beta;

    auto next = fidelity_value_and_grad(candidate, cube);
    require_finite(candidate, next.value, t + 1);

    TelemetryRecord rec = record_telemetry(
        IterateState{candidate, cube, cfg.regularizer, t + 1, monitor.stamp(), beta, inner,
                     st.tau, st.sigma, next.value},
        options.truth);
    rec.h_candidate = h_candidate;
    rec.h_current = current.value;
    rec.linear_term = linear;
    rec.distance_sq = dist2;

    std::swap(result.x, candidate);
    std::swap(result.y, y_next);
    current = std::move(next);
    result.final_beta = beta;
    if (monitor.push(std::move(rec), result.x)) break;
  }
  monitor.finish();
  return result;
}

SolveResult fbwb_solve(const ChannelStack& x0, const DataCube& cube, const SolverConfig& cfg,
                       const SolveOptions& options) {
  check_problem(x0, cube, cfg);
  if (cfg.regularizer.variant != Regularizer::TVH) {
    throw ConfigError("fbwb_solve needs the smooth hyperbolic TV; use pdwb_solve for TV");
  }

  SolveResult result;
  result.x = x0;
  result.y = DualStack(x0.channels(), x0.shape());
  RunMonitor monitor(cfg, options, result);

  struct SmoothEval {
    double fidelity = 0.0;
    double value = 0.0;
    ChannelStack gradient;
  };
  auto evaluate = [&](const ChannelStack& x) {
    auto fid = fidelity_value_and_grad(x, cube);
    SmoothEval e;
    e.fidelity = fid.value;
    e.value = fid.value + tvh_value(x, cfg.regularizer);
    e.gradient = std::move(fid.gradient);
    axpy(1.0, tvh_grad(x, cfg.regularizer).values(), e.gradient.values());
    return e;
  };
  auto smooth_value = [&](const ChannelStack& x) {
    return fidelity_value(x, cube) + tvh_value(x, cfg.regularizer);
  };

  double beta = cfg.beta0;
  ChannelStack candidate;
  ChannelStack diff;
  SmoothEval current = evaluate(result.x);
  require_finite(result.x, current.value, 0);

  for (std::size_t t = 0; t < cfg.max_outer; ++t) {
    const double slack = majorant_slack(current.value);
    std::size_t inner = 0;
    double trial_beta = beta;
    double step = 0.0;
    double f_candidate = 0.0;
    double linear = 0.0;
    double dist2 = 0.0;
    for (;; ++inner) {
      trial_beta = beta * std::pow(cfg.eta, static_cast<double>(inner));
      step = cfg.gamma / trial_beta;
      primal_step(result.x, current.gradient, step, cfg.constrained, candidate);
      f_candidate = smooth_value(candidate);
      diff = candidate;
      axpy(-1.0, result.x.values(), diff.values());
      linear = dot(diff.values(), current.gradient.values());
      dist2 = squared_norm(diff.values());
      const double majorant = current.value + linear + 0.5 * trial_beta * dist2;
      if (f_candidate <= majorant + slack) break;
      if (inner + 1 >= cfg.max_inner) {
        throw BacktrackingStallError(t, f_candidate, majorant, trial_beta);
      }
    }
    beta = trial_beta;

    SmoothEval next = evaluate(candidate);
    require_finite(candidate, next.value, t + 1);

    TelemetryRecord rec = record_telemetry(
        IterateState{candidate, cube, cfg.regularizer, t + 1, monitor.stamp(), beta, inner, step,
                     0.0, next.fidelity},
        options.truth);
    rec.h_candidate = f_candidate;
    rec.h_current = current.value;
    rec.linear_term = linear;
    rec.distance_sq = dist2;

    std::swap(result.x, candidate);
    current = std::move(next);
    result.final_beta = beta;
    if (monitor.push(std::move(rec), result.x)) break;
  }
  monitor.finish();
  return result;
}

}  // namespace stokes_prox
