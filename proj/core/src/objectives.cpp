#include "stokes_prox/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/gradient.hpp"

namespace stokes_prox {

void RegularizerConfig::validate(std::size_t components) const {
  if (lambda.size() != components) {
    throw ConfigError("regularizer has " + std::to_string(lambda.size()) + " weights for " +
                      std::to_string(components) + " components");
  }
  for (double l : lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ParameterError("regularizer weights must be finite and >= 0");
  }
  if (variant == Regularizer::TVH && !(epsilon > 0.0)) {
    throw ParameterError("hyperbolic TV needs epsilon > 0");
  }
}

namespace {

// Weighted residuals W_k (M_k x − d_k) and the fidelity value.
double weighted_residuals(const ChannelStack& x, const DataCube& cube, FrameSet* residuals) {
  FrameSet r = measure(x, cube);
  double value = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto& f = cube.frames[k];
    auto& rk = r[k];
    double frame_sum = 0.0;
    for (std::size_t i = 0; i < rk.size(); ++i) {
      const double e = rk[i] - f.measurements[i];
      frame_sum += f.weights[i] * e * e;
      rk[i] = f.weights[i] * e;
    }
    value += 0.5 * frame_sum;
  }
  if (residuals) *residuals = std::move(r);
  return value;
}

}  // namespace

double fidelity_value(const ChannelStack& x, const DataCube& cube) {
  return weighted_residuals(x, cube, nullptr);
}

FidelityEval fidelity_value_and_grad(const ChannelStack& x, const DataCube& cube) {
  FrameSet r;
  FidelityEval out;
  out.value = weighted_residuals(x, cube, &r);
  out.gradient = measure_adjoint(r, cube);
  return out;
}

ChannelStack fidelity_grad(const ChannelStack& x, const DataCube& cube) {
  return fidelity_value_and_grad(x, cube).gradient;
}

double fidelity_lipschitz(const DataCube& cube, RngStream& rng, std::size_t iterations, double tol) {
  cube.validate();
  const std::size_t comps = cube.components();
  const Shape shape = cube.shape;
  const std::size_t n = shape.pixels();
  LinearMap op;
  op.input_size = comps * n;
  // W^{1/2} M and its adjoint; ‖W^{1/2} M‖² = ‖Mᵀ W M‖.
  op.apply = [&](std::span<const double> v) {
    ChannelStack x(comps, shape, std::vector<double>(v.begin(), v.end()));
    FrameSet frames = measure(x, cube);
    std::vector<double> out;
    out.reserve(frames.size() * 2 * n);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      for (std::size_t i = 0; i < 2 * n; ++i) {
        out.push_back(std::sqrt(cube.frames[k].weights[i]) * frames[k][i]);
      }
    }
    return out;
  };
  op.adjoint = [&](std::span<const double> u) {
    FrameSet frames(cube.frames.size(), std::vector<double>(2 * n));
    for (std::size_t k = 0; k < frames.size(); ++k) {
      for (std::size_t i = 0; i < 2 * n; ++i) {
        frames[k][i] = std::sqrt(cube.frames[k].weights[i]) * u[k * 2 * n + i];
      }
    }
    return measure_adjoint(frames, cube).raw();
  };
  const auto est = norm_power(op, iterations, tol, rng);
  return est.value * est.value;
}

double tv_value(const ChannelStack& x, const RegularizerConfig& cfg) {
  if (cfg.variant != Regularizer::TV) throw ConfigError("tv_value: regularizer variant is not TV");
  cfg.validate(x.channels());
  std::vector<double> field(2 * x.pixels());
  double total = 0.0;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    if (cfg.lambda[c] == 0.0) continue;
    grad_forward(x.plane(c), x.shape(), field);
    double s = 0.0;
    for (double g : field) s += std::abs(g);
    total += cfg.lambda[c] * s;
  }
  return total;
}

double tvh_value(const ChannelStack& x, const RegularizerConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ParameterError("tvh_value: epsilon must be > 0");
  cfg.validate(x.channels());
  const std::size_t n = x.pixels();
  const double eps = cfg.epsilon;
  const double eps2 = eps * eps;
  std::vector<double> field(2 * n);
  double total = 0.0;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    if (cfg.lambda[c] == 0.0) continue;
    grad_forward(x.plane(c), x.shape(), field);
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double gx = field[p];
      const double gy = field[n + p];
      const double sq = gx * gx + gy * gy;
      // √(a + ε²) − ε written without cancellation.
      s += sq / (std::sqrt(sq + eps2) + eps);
    }
    total += cfg.lambda[c] * s;
  }
  return total;
}

ChannelStack tvh_grad(const ChannelStack& x, const RegularizerConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ParameterError("tvh_grad: epsilon must be > 0");
  cfg.validate(x.channels());
  const std::size_t n = x.pixels();
  const double eps2 = cfg.epsilon * cfg.epsilon;
  ChannelStack out(x.channels(), x.shape());
  std::vector<double> field(2 * n);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    if (cfg.lambda[c] == 0.0) continue;
    grad_forward(x.plane(c), x.shape(), field);
    for (std::size_t p = 0; p < n; ++p) {
      const double gx = field[p];
      const double gy = field[n + p];
      const double scale = cfg.lambda[c] / std::sqrt(gx * gx + gy * gy + eps2);
      field[p] = scale * gx;
      field[n + p] = scale * gy;
    }
    grad_adjoint(field, x.shape(), out.plane(c));
  }
  return out;
}

double regularizer_value(const ChannelStack& x, const RegularizerConfig& cfg) {
  return cfg.variant == Regularizer::TV ? tv_value(x, cfg) : tvh_value(x, cfg);
}

double feasibility_violation(const ChannelStack& x) {
  const std::size_t comps = x.channels();
  if (comps < 2) return 0.0;
  const std::size_t n = x.pixels();
  const auto v = x.values();
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double rho2 = 0.0;
    for (std::size_t c = 1; c < comps; ++c) rho2 += v[c * n + p] * v[c * n + p];
    worst = std::max(worst, std::sqrt(rho2) - v[p]);
  }
  return worst;
}

ObjectiveReport objective_report(const ChannelStack& x, const DataCube& cube,
                                 const RegularizerConfig& cfg, bool constrained) {
  ObjectiveReport r;
  r.fidelity = fidelity_value(x, cube);
  r.regularizer = regularizer_value(x, cfg);
  r.total = r.fidelity + r.regularizer;
  r.feasibility_violation = feasibility_violation(x);
  r.infeasible = constrained && r.feasibility_violation > 1e-9 * std::max(1.0, max_abs(x.values()));
  return r;
}

}  // namespace stokes_prox
