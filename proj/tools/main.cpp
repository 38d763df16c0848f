#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "experiment.hpp"
#include "stokes_prox/errors.hpp"

namespace fs = std::filesystem;
using namespace stokes_prox;
using namespace stokes_prox::cli;

namespace {

/// Flags shared by simulate and reconstruct. Unset flags leave the config
/// file value alone.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> regularizer;
  std::optional<bool> constrained;
  std::optional<double> lambda_i, lambda_qu, epsilon;
  std::optional<double> beta0, eta, r, gamma, s;
  std::optional<std::size_t> max_outer, max_inner;
  std::optional<double> stop_tol, time_budget;
  std::optional<std::string> oracle_beta;
  std::optional<std::size_t> telemetry_period, snapshot_period;
  std::optional<std::string> truth;
  std::optional<std::size_t> height, width, frames;
  std::optional<double> fwhm, sigma_ro;
  bool deterministic = false;
  bool force = false;
};

template <class T, class U>
void apply(const std::optional<T>& src, U& dst) {
  if (src) dst = *src;
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config ? load_config(*o.config) : ExperimentConfig{};
  if (o.out) cfg.out = *o.out;
  if (o.truth) cfg.truth = fs::path(*o.truth);
  if (o.method) cfg.method = parse_method(*o.method);
  if (o.regularizer) {
    nlohmann::json j;
    j["regularizer"] = *o.regularizer;
    cfg.merge_json(j);
  }
  if (o.constrained) cfg.constrained = *o.constrained;
  if (o.oracle_beta) {
    nlohmann::json j;
    if (*o.oracle_beta == "auto") {
      j["oracle_beta"] = "auto";
    } else {
      try {
        j["oracle_beta"] = std::stod(*o.oracle_beta);
      } catch (const std::exception&) {
        throw ConfigError("--oracle-beta expects a number or 'auto'");
      }
    }
    cfg.merge_json(j);
  }
  apply(o.seed, cfg.seed);
  apply(o.lambda_i, cfg.lambda_i);
  apply(o.lambda_qu, cfg.lambda_qu);
  apply(o.epsilon, cfg.epsilon);
  apply(o.beta0, cfg.beta0);
  apply(o.eta, cfg.eta);
  apply(o.r, cfg.r);
  apply(o.gamma, cfg.gamma);
  apply(o.s, cfg.s);
  apply(o.max_outer, cfg.max_outer);
  apply(o.max_inner, cfg.max_inner);
  apply(o.stop_tol, cfg.stop_tol);
  apply(o.time_budget, cfg.time_budget);
  apply(o.telemetry_period, cfg.telemetry_period);
  apply(o.snapshot_period, cfg.snapshot_period);
  apply(o.height, cfg.height);
  apply(o.width, cfg.width);
  apply(o.frames, cfg.frames);
  apply(o.fwhm, cfg.fwhm);
  apply(o.sigma_ro, cfg.sigma_ro);
  if (o.deterministic) cfg.deterministic = true;
  if (o.force) cfg.force = true;
  return cfg;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file (flat keys)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_flag("--deterministic", o.deterministic, "Single thread, zero time column");
  cmd->add_flag("--force", o.force, "Overwrite a non-empty output directory");
}

void add_solver(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--method", o.method, "pdwb | pd | fbwb")->check(CLI::IsMember({"pdwb", "pd", "fbwb"}));
  cmd->add_option("--regularizer", o.regularizer, "tv | tvh (must match the method)")
      ->check(CLI::IsMember({"tv", "tvh"}));
  cmd->add_option("--constrained", o.constrained, "Enforce sqrt(Q^2+U^2) <= I (true|false)");
  cmd->add_option("--lambda-i", o.lambda_i, "TV weight on I");
  cmd->add_option("--lambda-qu", o.lambda_qu, "TV weight on Q and U");
  cmd->add_option("--epsilon", o.epsilon, "TV-h smoothing level");
  cmd->add_option("--beta0", o.beta0, "Initial Lipschitz estimate");
  cmd->add_option("--eta", o.eta, "Backtracking growth factor");
  cmd->add_option("--r", o.r, "Primal/dual balance");
  cmd->add_option("--gamma", o.gamma, "Step factor in (0, 2)");
  cmd->add_option("--s", o.s, "Step-rule exponent in [0, 2]");
  cmd->add_option("--max-outer", o.max_outer, "Outer iteration cap");
  cmd->add_option("--max-inner", o.max_inner, "Backtracking trials per iteration");
  cmd->add_option("--stop-tol", o.stop_tol, "Relative objective change for convergence");
  cmd->add_option("--time-budget", o.time_budget, "Wall-clock cap in seconds (0 = none)");
  cmd->add_option("--oracle-beta", o.oracle_beta, "Lipschitz constant for pd, or 'auto'");
  cmd->add_option("--telemetry-period", o.telemetry_period, "Flush telemetry every N rows");
  cmd->add_option("--snapshot-period", o.snapshot_period, "Write the iterate every N iterations");
  cmd->add_option("--truth", o.truth, "Ground truth (stack file or directory with truth_*.f64)");
}

void add_scene(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--height", o.height, "Image height");
  cmd->add_option("--width", o.width, "Image width");
  cmd->add_option("--frames", o.frames, "Frame count K (multiple of 4)");
  cmd->add_option("--fwhm", o.fwhm, "Gaussian PSF FWHM in pixels");
  cmd->add_option("--sigma-ro", o.sigma_ro, "Readout noise standard deviation");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained polarimetric reconstruction with backtracked primal-dual splitting"};
  app.require_subcommand(1);

  Overrides sim;
  auto* simulate = app.add_subcommand("simulate", "Synthesize a data cube and its ground truth");
  add_common(simulate, sim);
  add_scene(simulate, sim);

  Overrides rec;
  std::optional<std::string> cube_arg;
  auto* reconstruct = app.add_subcommand("reconstruct", "Run a solver on a data cube");
  reconstruct->add_option("cube", cube_arg, "Cube directory");
  add_common(reconstruct, rec);
  add_solver(reconstruct, rec);

  std::string recon_path, truth_path;
  std::optional<std::string> eval_out;
  double eval_tol = 1e-9;
  auto* evaluate = app.add_subcommand("evaluate", "Score a reconstruction against ground truth");
  evaluate->add_option("recon", recon_path, "Reconstruction stack (.f64)")->required();
  evaluate->add_option("truth", truth_path, "Truth stack or cube directory")->required();
  evaluate->add_option("--out", eval_out, "Directory for report.json and violation_mask.f64");
  evaluate->add_option("--tol", eval_tol, "Violation threshold");

  std::vector<std::string> curve_inputs;
  std::optional<std::string> curves_out;
  auto* curves = app.add_subcommand("curves", "Merge telemetry files into long-format CSV");
  curves->add_option("telemetry", curve_inputs, "Telemetry files, optionally label=path")->required();
  curves->add_option("--out", curves_out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      cmd_simulate(resolve(sim), std::cout);
      return kExitConverged;
    }
    if (*reconstruct) {
      ExperimentConfig cfg = resolve(rec);
      if (cube_arg) cfg.cube = *cube_arg;
      return cmd_reconstruct(cfg, std::cout).exit_code;
    }
    if (*evaluate) {
      EvaluateOptions opts;
      opts.tolerance = eval_tol;
      if (eval_out) opts.out = fs::path(*eval_out);
      std::cout << cmd_evaluate(recon_path, truth_path, opts).dump(2) << '\n';
      return kExitConverged;
    }
    if (*curves) {
      std::vector<std::pair<std::string, fs::path>> inputs;
      for (std::size_t i = 0; i < curve_inputs.size(); ++i) {
        const auto& arg = curve_inputs[i];
        const auto eq = arg.find('=');
        if (eq != std::string::npos) {
          inputs.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
        } else {
          // Default label: the run directory, made unique by position.
          const fs::path p(arg);
          std::string label = p.parent_path().filename().string();
          if (label.empty()) label = p.stem().string();
          inputs.emplace_back(label + (curve_inputs.size() > 1 ? "#" + std::to_string(i) : ""), p);
        }
      }
      if (curves_out) {
        std::ofstream f(*curves_out);
        if (!f) throw IoError(*curves_out, "cannot open for writing");
        cmd_curves(inputs, f);
      } else {
        cmd_curves(inputs, std::cout);
      }
      return kExitConverged;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}
