#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/gradient.hpp"
#include "stokes_prox/objectives.hpp"
#include "stokes_prox/prox.hpp"
#include "stokes_prox/simkit.hpp"
#include "stokes_prox/solvers.hpp"
#include "test_support.hpp"

using namespace stokes_prox;
using namespace stokes_prox::testing;

namespace {

RegularizerConfig tv(std::vector<double> lambda) { return {std::move(lambda), 1e-2, Regularizer::TV}; }

/// One channel, identity blur, unit weight on the left beam: h(x) = ½‖d − x‖².
DataCube denoise_cube(Shape shape, std::vector<double> d, double weight = 1.0) {
  const std::size_t n = shape.pixels();
  d.resize(2 * n, 0.0);
  DataCube cube{shape, {}, PsfKernel::delta(shape), 1.0, 0};
  std::vector<double> w(2 * n, 1.0);
  std::fill(w.begin(), w.begin() + static_cast<long>(n), weight);
  cube.frames.push_back({std::move(d), std::move(w), {1.0}, {0.0}});
  return cube;
}

/// Step edge plus Gaussian noise on 8×8.
DataCube noisy_edge() {
  const Shape shape{8, 8};
  RngStream rng(5);
  std::vector<double> d(64);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) d[i * 8 + j] = (j >= 4 ? 1.0 : 0.0) + 0.2 * rng.gaussian();
  return denoise_cube(shape, d);
}

/// Delta PSF, unit weights, four half-wave-plate positions. Σ_k M_kᵀM_k =
/// diag(2, 1, 1) per pixel, so the fidelity Lipschitz constant is exactly 2.
DataCube unit_weight_dpi(Shape shape, std::uint64_t seed) {
  PhantomSpec spec;
  spec.height = shape.height;
  spec.width = shape.width;
  const auto truth = make_phantom(spec);
  DataCube cube = synthesize(truth, dpi_schedule(4), PsfKernel::delta(shape), 1.0, seed);
  for (auto& f : cube.frames) std::fill(f.weights.begin(), f.weights.end(), 1.0);
  return cube;
}

void expect_accepts_hold(const SolveResult& res) {
  for (const auto& r : res.telemetry) {
    const double majorant = r.h_current + r.linear_term + 0.5 * r.beta * r.distance_sq;
    EXPECT_LE(r.h_candidate, majorant + majorant_slack(r.h_current)) << "iteration " << r.iteration;
  }
}

}  // namespace

TEST(StepRule, DefaultParameters) {
  SolverConfig cfg;
  const double norm_d = std::sqrt(8.0);
  const auto st = step_rule(1e-2, norm_d, cfg);
  EXPECT_NEAR(st.tau, 1.0 / (1e-2 / 1.99 + 1e-3), 1e-9);
  EXPECT_NEAR(st.tau, 165.9716, 1e-4);
  EXPECT_NEAR(st.sigma, 1.25e-4, 1e-16);
  EXPECT_LE(relative_gap(1.0 / st.tau - st.sigma * 8.0, 1e-2 / 1.99), 1e-12);
}

TEST(StepRule, SquaredExponentGivesClosedForm) {
  SolverConfig cfg;
  cfg.r = 0.3;
  cfg.gamma = 1.5;
  const double d = 2.5;
  const auto st = step_rule(4.0, d, cfg);
  EXPECT_NEAR(st.tau, 1.0 / (4.0 / 1.5 + 0.3), 1e-14);
  EXPECT_NEAR(st.sigma, 0.3 / (d * d), 1e-16);
}

TEST(StepRule, ZeroBeta) {
  SolverConfig cfg;
  cfg.s = 1.0;
  const double d = 2.0;
  const auto st = step_rule(0.0, d, cfg);
  EXPECT_TRUE(std::isfinite(st.tau));
  EXPECT_NEAR(st.tau, 1.0 / (cfg.r * d), 1e-9);
  EXPECT_GE(1.0 / st.tau - st.sigma * d * d, -1e-15);
}

TEST(StepRule, ConditionResidualRandom) {
  RngStream rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    SolverConfig cfg;
    cfg.r = std::pow(10.0, rng.uniform(-6.0, 2.0));
    cfg.gamma = rng.uniform(1e-3, 1.999);
    cfg.s = rng.uniform(0.0, 2.0);
    const double beta = std::pow(10.0, rng.uniform(-6.0, 6.0));
    const double d = rng.uniform(0.1, std::sqrt(8.0));
    const auto st = step_rule(beta, d, cfg);
    const double lhs = 1.0 / st.tau - st.sigma * d * d;
    EXPECT_LE(std::abs(lhs - beta / cfg.gamma), 1e-12 * (1.0 / st.tau));
    EXPECT_GE(lhs, beta / 2.0);
  }
}

TEST(StepRule, RejectsBadParameters) {
  SolverConfig cfg;
  EXPECT_THROW(step_rule(-1.0, 2.0, cfg), ParameterError);
  EXPECT_THROW(step_rule(1.0, 0.0, cfg), ParameterError);
  cfg.gamma = 2.0;
  EXPECT_THROW(step_rule(1.0, 2.0, cfg), ParameterError);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta = 1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.s = 2.5;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.beta0 = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Telemetry, NormalizedMse) {
  RngStream rng(2);
  const auto truth = random_stack(rng, 3, Shape{4, 4}, 0.5, 2.0);
  ChannelStack twice = truth;
  for (auto& v : twice.values()) v *= 2.0;
  for (const auto& e : normalized_mse(truth, truth)) EXPECT_EQ(e.value, 0.0);
  for (const auto& e : normalized_mse(twice, truth)) EXPECT_DOUBLE_EQ(e.value, 1.0);
  for (const auto& e : normalized_mse(ChannelStack(3, truth.shape()), truth)) EXPECT_EQ(e.value, 1.0);
}

TEST(Telemetry, ZeroTruthChannelReportsAbsoluteError) {
  const ChannelStack truth(2, Shape{1, 2}, {1.0, 1.0, 0.0, 0.0});
  const ChannelStack x(2, Shape{1, 2}, {1.0, 1.0, 3.0, 4.0});
  const auto mse = normalized_mse(x, truth);
  EXPECT_FALSE(mse[0].absolute);
  EXPECT_TRUE(mse[1].absolute);
  EXPECT_EQ(mse[1].value, 25.0);
}

TEST(Telemetry, RecordCarriesObjectiveParts) {
  RngStream rng(3);
  const auto cube = random_cube(rng, Shape{4, 4}, 2, 3);
  const auto x = random_stack(rng, 3, cube.shape);
  const auto reg = tv({0.1, 0.03, 0.03});
  const auto rec = record_telemetry(IterateState{x, cube, reg, 7, 0.5, 2.0, 3, 0.1, 0.2, std::nullopt}, &x);
  EXPECT_EQ(rec.iteration, 7u);
  EXPECT_EQ(rec.fidelity, fidelity_value(x, cube));
  EXPECT_EQ(rec.regularizer, tv_value(x, reg));
  EXPECT_EQ(rec.objective, rec.fidelity + rec.regularizer);
  EXPECT_EQ(rec.violation, feasibility_violation(x));
  ASSERT_EQ(rec.mse.size(), 3u);
  EXPECT_EQ(rec.mse[0].value, 0.0);
  EXPECT_EQ(rec.inner_count, 3u);
}

TEST(PdSolve, FixedPointStaysPut) {
  RngStream rng(4);
  auto cube = random_cube(rng, Shape{5, 5}, 3, 3);
  const auto x0 = random_stack(rng, 3, cube.shape);
  const auto m = measure(x0, cube);
  for (std::size_t k = 0; k < 3; ++k) cube.frames[k].measurements = m[k];
  SolverConfig cfg;
  cfg.regularizer = tv({0.0, 0.0, 0.0});
  cfg.constrained = false;
  cfg.oracle_beta = fidelity_lipschitz(cube, rng);
  cfg.max_outer = 50;
  cfg.stop_tol = 0.0;
  const auto res = pd_solve(x0, DualStack(3, cube.shape), cube, cfg);
  EXPECT_LE(std::sqrt(squared_distance(res.x.values(), x0.values())), 1e-12);
}

TEST(PdSolve, OnePixelConstrainedMatchesGridSearch) {
  // ½((I+Q)/2 − 3)² + ½((I−Q)/2 + 1)² over √(Q² + U²) <= I.
  const Shape shape{1, 1};
  DataCube cube{shape, {}, PsfKernel::delta(shape), 1.0, 0};
  cube.frames.push_back({{3.0, -1.0}, {1.0, 1.0}, {0.5, 0.5, 0.0}, {0.5, -0.5, 0.0}});

  // Oracle: cone points I·(1, s cos φ, s sin φ); dense grid then zoom.
  auto F = [](double I, double s, double phi) {
    const double Q = I * s * std::cos(phi);
    const double a = 0.5 * (I + Q) - 3.0, b = 0.5 * (I - Q) + 1.0;
    return 0.5 * a * a + 0.5 * b * b;
  };
  double best = INFINITY, bI = 0, bs = 0, bphi = 0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 50; ++j)
      for (int k = 0; k < 64; ++k) {
        const double I = 0.1 * i, s = j / 50.0, phi = 2 * std::numbers::pi * k / 64;
        if (const double f = F(I, s, phi); f < best) best = f, bI = I, bs = s, bphi = phi;
      }
  double wI = 0.1, ws = 0.02, wphi = 2 * std::numbers::pi / 64;
  for (int round = 0; round < 50; ++round) {
    const double cI = bI, cs = bs, cphi = bphi;
    for (int i = -3; i <= 3; ++i)
      for (int j = -3; j <= 3; ++j)
        for (int k = -3; k <= 3; ++k) {
          const double I = std::max(0.0, cI + wI * i / 3), s = std::clamp(cs + ws * j / 3, 0.0, 1.0);
          const double phi = cphi + wphi * k / 3;
          if (const double f = F(I, s, phi); f < best) best = f, bI = I, bs = s, bphi = phi;
        }
    wI *= 0.6, ws *= 0.6, wphi *= 0.6;
  }
  const double oracle[3] = {bI, bI * bs * std::cos(bphi), bI * bs * std::sin(bphi)};

  SolverConfig cfg;
  cfg.regularizer = tv({0.0, 0.0, 0.0});
  cfg.oracle_beta = 0.5;  // ½·diag(1, 1, 0)
  cfg.max_outer = 20000;
  cfg.stop_tol = 0.0;
  const auto res = pd_solve(ChannelStack(3, shape), DualStack(3, shape), cube, cfg);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(res.x.values()[c], oracle[c], 1e-6) << "component " << c;
  EXPECT_NEAR(res.x.values()[0], 3.0, 1e-6);
  EXPECT_NEAR(res.x.values()[1], 3.0, 1e-6);
}

TEST(PdSolve, TvDenoisingReachesFrozenReference) {
  // 10⁵-iteration value of this instance (r = 1), computed once.
  constexpr double kReference = 3.48896864595865;
  const auto cube = noisy_edge();
  SolverConfig cfg;
  cfg.regularizer = tv({0.3});
  cfg.constrained = false;
  cfg.oracle_beta = 1.0;
  cfg.r = 1.0;
  cfg.max_outer = 2000;
  cfg.stop_tol = 0.0;
  const auto res = pd_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg);
  EXPECT_LE(relative_gap(res.telemetry.back().objective, kReference), 1e-6);
}

TEST(PdSolve, RequiresOracleBetaAndTv) {
  const auto cube = noisy_edge();
  SolverConfig cfg;
  cfg.regularizer = tv({0.3});
  cfg.constrained = false;
  EXPECT_THROW(pd_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg), ConfigError);
  cfg.oracle_beta = 1.0;
  cfg.regularizer.variant = Regularizer::TVH;
  EXPECT_THROW(pd_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg), ConfigError);
}

TEST(PdwbSolve, QuadraticWithLargeStartNeverBacktracks) {
  const double beta_true = 3.0;
  const auto cube = denoise_cube(Shape{1, 1}, {0.0}, beta_true);
  SolverConfig cfg;
  cfg.regularizer = tv({0.0});
  cfg.constrained = false;
  cfg.beta0 = 5.0;
  cfg.max_outer = 200;
  cfg.stop_tol = 0.0;
  const auto res = pdwb_solve(ChannelStack(1, Shape{1, 1}, 1.0), DualStack(1, Shape{1, 1}), cube, cfg);
  for (const auto& r : res.telemetry) {
    EXPECT_EQ(r.inner_count, 0u);
    EXPECT_EQ(r.beta, 5.0);
  }
  EXPECT_EQ(res.total_rejections, 0u);
}

TEST(PdwbSolve, QuadraticFromSmallStartStaysInEnvelope) {
  const double beta_true = 3.0;
  const auto cube = denoise_cube(Shape{1, 1}, {0.0}, beta_true);
  SolverConfig cfg;
  cfg.regularizer = tv({0.0});
  cfg.constrained = false;
  cfg.beta0 = beta_true / 100.0;
  cfg.eta = 1.1;
  cfg.max_outer = 200;
  cfg.stop_tol = 0.0;
  const auto res = pdwb_solve(ChannelStack(1, Shape{1, 1}, 1.0), DualStack(1, Shape{1, 1}), cube, cfg);
  EXPECT_LE(res.final_beta, 1.1 * beta_true);
  EXPECT_GE(res.final_beta, beta_true / 1.1);
  EXPECT_GT(res.total_rejections, 0u);
  expect_accepts_hold(res);
}

TEST(PdwbSolve, UnitWeightEnvelopeAndMonotoneBeta) {
  const auto cube = unit_weight_dpi(Shape{16, 16}, 11);
  const double beta_star = 2.0;
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.beta0 = beta_star / 100.0;
  cfg.max_outer = 500;
  cfg.stop_tol = 0.0;
  const auto res = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  double prev = 0.0;
  for (const auto& r : res.telemetry) {
    EXPECT_GE(r.beta, prev);
    prev = r.beta;
  }
  EXPECT_LE(res.final_beta, 1.1 * beta_star);
  expect_accepts_hold(res);
}

TEST(PdwbSolve, ConstrainedIteratesAreFeasible) {
  const auto cube = unit_weight_dpi(Shape{12, 12}, 12);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.max_outer = 200;
  cfg.stop_tol = 0.0;
  RngStream rng(3);
  // An infeasible start: the first prox already lands in the cone.
  const auto x0 = random_stack(rng, 3, cube.shape, -5.0, 5.0);
  const auto res = pdwb_solve(x0, DualStack(3, cube.shape), cube, cfg, {.snapshot_period = 1, .on_snapshot =
      [](std::size_t, const ChannelStack& x) {
        EXPECT_LE(feasibility_violation(x), 1e-12 * std::max(1.0, max_abs(x.values())));
      }});
  EXPECT_EQ(res.iterations, 200u);
}

TEST(PdwbSolve, MatchesOracleStepPdOnSmallScene) {
  PhantomSpec spec;
  spec.height = spec.width = 16;
  const auto cube = synthesize(make_phantom(spec), dpi_schedule(4), gaussian_psf(16, 16, 1.0), 1.0, 3);
  RngStream rng(1);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.oracle_beta = fidelity_lipschitz(cube, rng);
  cfg.max_outer = 4000;
  cfg.stop_tol = 0.0;
  const auto pd = pd_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  const auto pdwb = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  EXPECT_LE(relative_gap(pd.telemetry.back().objective, pdwb.telemetry.back().objective), 1e-6);
}

TEST(PdwbSolve, UnconstrainedDenoisingMatchesPdLimit) {
  const auto cube = noisy_edge();
  SolverConfig cfg;
  cfg.regularizer = tv({0.3});
  cfg.constrained = false;
  cfg.oracle_beta = 1.0;
  cfg.r = 1.0;
  cfg.max_outer = 3000;
  cfg.stop_tol = 0.0;
  const auto pd = pd_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg);
  const auto pdwb = pdwb_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg);
  EXPECT_LE(relative_gap(pd.telemetry.back().objective, pdwb.telemetry.back().objective), 1e-5);
}

TEST(PdwbSolve, StallRaisesWithDiagnostics) {
  const auto cube = unit_weight_dpi(Shape{8, 8}, 13);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.beta0 = 1e-6;
  cfg.max_inner = 3;
  try {
    pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
    FAIL() << "expected a stall";
  } catch (const BacktrackingStallError& e) {
    EXPECT_EQ(e.iteration(), 0u);
    EXPECT_GT(e.h_candidate(), e.majorant());
    EXPECT_NEAR(e.beta_trial(), 1e-6 * 1.1 * 1.1, 1e-18);
  }
}

TEST(PdwbSolve, OverflowRaisesDivergence) {
  auto cube = denoise_cube(Shape{2, 2}, {1e200, 1e200, 1e200, 1e200});
  SolverConfig cfg;
  cfg.regularizer = tv({0.0});
  cfg.constrained = false;
  EXPECT_THROW(pdwb_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg), DivergenceError);
}

TEST(PdwbSolve, StopsOnRelativeChange) {
  const auto cube = noisy_edge();
  SolverConfig cfg;
  cfg.regularizer = tv({0.3});
  cfg.constrained = false;
  cfg.r = 1.0;
  cfg.max_outer = 100000;
  cfg.stop_tol = 1e-10;
  const auto res = pdwb_solve(ChannelStack(1, cube.shape), DualStack(1, cube.shape), cube, cfg);
  EXPECT_EQ(res.status, SolverStatus::Converged);
  EXPECT_LT(res.iterations, 100000u);
}

TEST(PdwbSolve, RejectsMismatchedInputs) {
  const auto cube = unit_weight_dpi(Shape{4, 4}, 1);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  EXPECT_THROW(pdwb_solve(ChannelStack(3, cube.shape), DualStack(2, cube.shape), cube, cfg), DimensionError);
  EXPECT_THROW(pdwb_solve(ChannelStack(2, cube.shape), DualStack(2, cube.shape), cube, cfg), ConfigError);
  cfg.regularizer.variant = Regularizer::TVH;
  EXPECT_THROW(pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg), ConfigError);
  ChannelStack bad(3, cube.shape);
  bad.values()[0] = NAN;
  cfg.regularizer.variant = Regularizer::TV;
  EXPECT_THROW(pdwb_solve(bad, DualStack(3, cube.shape), cube, cfg), ParameterError);
}

TEST(FbwbSolve, LeastSquaresGradientCertificate) {
  const auto cube = unit_weight_dpi(Shape{8, 8}, 21);
  SolverConfig cfg;
  cfg.regularizer = {{0.0, 0.0, 0.0}, 1e-2, Regularizer::TVH};
  cfg.constrained = false;
  cfg.max_outer = 2000;
  cfg.stop_tol = 0.0;
  const ChannelStack x0(3, cube.shape);
  const double g0 = std::sqrt(squared_norm(fidelity_grad(x0, cube).values()));
  const auto res = fbwb_solve(x0, cube, cfg);
  const double g1 = std::sqrt(squared_norm(fidelity_grad(res.x, cube).values()));
  EXPECT_LE(g1, 1e-6 * g0);
}

TEST(FbwbSolve, ConstrainedIteratesAreFeasible) {
  const auto cube = unit_weight_dpi(Shape{10, 10}, 22);
  SolverConfig cfg;
  cfg.regularizer = {{0.1, 0.03, 0.03}, 1e-2, Regularizer::TVH};
  cfg.constrained = true;
  cfg.max_outer = 100;
  cfg.stop_tol = 0.0;
  RngStream rng(4);
  const auto x0 = random_stack(rng, 3, cube.shape, -5.0, 5.0);
  ASSERT_GT(feasibility_violation(x0), 0.0);
  std::size_t seen = 0;
  fbwb_solve(x0, cube, cfg, {.snapshot_period = 1, .on_snapshot = [&](std::size_t, const ChannelStack& x) {
    ++seen;
    EXPECT_LE(feasibility_violation(x), 1e-12 * std::max(1.0, max_abs(x.values())));
  }});
  EXPECT_EQ(seen, 100u);
}

TEST(FbwbSolve, StopRuleGapScalesWithTolerance) {
  // Relative-change stopping bounds the per-iteration progress, not the
  // distance to the optimum; the gap to a 10× longer run is checked against
  // stop_tol times the iteration count.
  PhantomSpec spec;
  spec.height = spec.width = 16;
  const auto cube = synthesize(make_phantom(spec), dpi_schedule(4), gaussian_psf(16, 16, 1.0), 1.0, 3);
  SolverConfig cfg;
  cfg.regularizer = {{0.1, 0.03, 0.03}, 1e-2, Regularizer::TVH};
  cfg.constrained = false;
  cfg.stop_tol = 1e-6;
  cfg.max_outer = 100000;
  const auto run = fbwb_solve(ChannelStack(3, cube.shape), cube, cfg);
  ASSERT_EQ(run.status, SolverStatus::Converged);
  cfg.stop_tol = 0.0;
  cfg.max_outer = 10 * run.iterations;
  const auto ref = fbwb_solve(ChannelStack(3, cube.shape), cube, cfg);
  const double gap = relative_gap(run.telemetry.back().objective, ref.telemetry.back().objective);
  EXPECT_LE(gap, 1e-6 * static_cast<double>(run.iterations));
  EXPECT_LE(ref.telemetry.back().objective, run.telemetry.back().objective);
  expect_accepts_hold(run);
}

TEST(FbwbSolve, RequiresHyperbolicTv) {
  const auto cube = unit_weight_dpi(Shape{4, 4}, 1);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  EXPECT_THROW(fbwb_solve(ChannelStack(3, cube.shape), cube, cfg), ConfigError);
}

TEST(Solvers, TimeBudgetStops) {
  const auto cube = unit_weight_dpi(Shape{32, 32}, 2);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.max_outer = 100000000;
  cfg.stop_tol = 0.0;
  cfg.time_budget_s = 0.2;
  const auto res = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  EXPECT_EQ(res.status, SolverStatus::TimeBudget);
  EXPECT_GE(res.wall_time_s, 0.2);
  EXPECT_LT(res.wall_time_s, 5.0);
}

TEST(Solvers, WallTimeCanBeSuppressed) {
  const auto cube = unit_weight_dpi(Shape{8, 8}, 2);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.max_outer = 20;
  const auto res = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg,
                              {.record_wall_time = false});
  for (const auto& r : res.telemetry) EXPECT_EQ(r.time_s, 0.0);
}

TEST(Solvers, DeterministicAcrossRuns) {
  const auto cube = unit_weight_dpi(Shape{16, 16}, 8);
  SolverConfig cfg;
  cfg.regularizer = tv({0.1, 0.03, 0.03});
  cfg.max_outer = 100;
  const auto a = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  const auto b = pdwb_solve(ChannelStack(3, cube.shape), DualStack(3, cube.shape), cube, cfg);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.final_beta, b.final_beta);
}
