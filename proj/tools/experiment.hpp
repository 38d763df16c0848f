#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stokes_prox/simkit.hpp"
#include "stokes_prox/solvers.hpp"

namespace stokes_prox::cli {

enum class Method { PDwB, PD, FBwB };

std::string to_string(Method m);
Method parse_method(const std::string& name);

/// Process exit codes of the stokes-prox tool.
enum ExitCode : int {
  kExitConverged = 0,
  kExitUsage = 1,
  kExitMaxIterations = 2,
  kExitStall = 3,
  kExitDivergence = 4,
};

/// Flat experiment description. JSON config files use the same keys.
struct ExperimentConfig {
  // paths
  std::filesystem::path cube;
  std::filesystem::path out;
  std::optional<std::filesystem::path> truth;

  // reconstruction
  Method method = Method::PDwB;
  std::optional<Regularizer> regularizer;  ///< derived from the method when unset
  std::optional<bool> constrained;         ///< pd/pdwb: true, fbwb: false when unset
  double lambda_i = 0.1;
  double lambda_qu = 0.03;
  double epsilon = 1e-2;
  double beta0 = 1e-2;
  double eta = 1.1;
  double r = 1e-3;
  double gamma = 1.99;
  double s = 2.0;
  std::size_t max_outer = 2000;
  std::size_t max_inner = 100;
  double stop_tol = 1e-8;
  double time_budget = 0.0;
  std::optional<double> oracle_beta;
  bool oracle_beta_auto = false;  ///< estimate β by power iteration
  std::size_t telemetry_period = 10;
  std::size_t snapshot_period = 0;
  bool deterministic = false;
  bool force = false;

  // simulation
  std::uint64_t seed = 42;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t frames = 8;
  double fwhm = 3.0;
  double sigma_ro = 1.0;

  Regularizer effective_regularizer() const;
  bool effective_constrained() const;
  SolverConfig solver_config() const;
  PhantomSpec phantom() const;

  /// Keys not present keep their current value; unknown keys are rejected.
  void merge_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Loads a JSON config file on top of the defaults.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes the cube directory plus truth_I/Q/U.f64. Refuses a non-empty
/// existing directory unless cfg.force.
void cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);

struct ReconstructOutcome {
  SolverStatus status = SolverStatus::MaxIterations;
  int exit_code = kExitMaxIterations;
  SolveResult result;
};

/// Runs the selected solver on cfg.cube and writes recon_<method>.f64,
/// telemetry.csv, summary.json and config.json into cfg.out. Solver
/// failures (stall, divergence) propagate as exceptions after the partial
/// telemetry is flushed.
ReconstructOutcome cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log);

struct EvaluateOptions {
  double tolerance = 1e-9;  ///< violation threshold for the count and mask
  std::optional<std::filesystem::path> out;  ///< defaults to the recon's directory
};

/// Compares a reconstruction with ground truth (a stack file or a cube
/// directory holding truth_*.f64); writes report.json and violation_mask.f64.
nlohmann::json cmd_evaluate(const std::filesystem::path& recon, const std::filesystem::path& truth,
                            const EvaluateOptions& options);

/// Merges telemetry files into long format: run_label,iter,time_s,metric,value.
/// Inputs are (label, path) pairs.
void cmd_curves(const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                std::ostream& out);

/// Ground truth next to a cube (truth_I/Q/U.f64) or a single stack file.
ChannelStack load_truth(const std::filesystem::path& path);

/// Telemetry CSV header used by reconstruct and expected by curves.
const std::vector<std::string>& telemetry_columns();

/// Maps a solver error to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace stokes_prox::cli
