#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string_view>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/gradient.hpp"
#include "stokes_prox/io.hpp"
#include "stokes_prox/parallel.hpp"
#include "stokes_prox/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace stokes_prox::cli {

namespace {

constexpr const char* kTruthNames[3] = {"truth_I.f64", "truth_Q.f64", "truth_U.f64"};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string regularizer_name(Regularizer r) { return r == Regularizer::TV ? "tv" : "tvh"; }

Regularizer parse_regularizer(const std::string& name) {
  if (name == "tv") return Regularizer::TV;
  if (name == "tvh") return Regularizer::TVH;
  throw ConfigError("unknown regularizer '" + name + "' (expected tv or tvh)");
}

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max_iterations";
    case SolverStatus::TimeBudget: return "time_budget";
  }
  return "unknown";
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

bool directory_nonempty(const fs::path& p) {
  return fs::is_directory(p) && fs::directory_iterator(p) != fs::directory_iterator();
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError(path.string(), "cannot open for writing");
  f << j.dump(2) << '\n';
  if (!f) throw IoError(path.string(), "write failed");
}

json mse_json(const std::vector<ChannelError>& mse) {
  json out = json::array();
  for (const auto& e : mse) out.push_back(e.value);
  return out;
}

/// Row buffer that writes the telemetry CSV in blocks of `period` rows.
class TelemetryWriter {
 public:
  TelemetryWriter(const fs::path& path, std::size_t period) : path_(path), period_(std::max<std::size_t>(period, 1)) {
    file_.open(path, std::ios::trunc);
    if (!file_) throw IoError(path.string(), "cannot open for writing");
    const auto& cols = telemetry_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) file_ << (i ? "," : "") << cols[i];
    file_ << '\n';
    file_.flush();
  }

  void add(const TelemetryRecord& r) {
    std::ostringstream row;
    row << r.iteration << ',' << format_double(r.time_s) << ',' << format_double(r.objective) << ','
        << format_double(r.fidelity) << ',' << format_double(r.regularizer) << ','
        << format_double(r.violation);
    for (std::size_t c = 0; c < 3; ++c) {
      row << ',';
      if (c < r.mse.size()) row << format_double(r.mse[c].value);
    }
    row << ',' << format_double(r.beta) << ',' << r.inner_count << ',' << format_double(r.tau) << ','
        << format_double(r.sigma) << '\n';
    pending_ += row.str();
    if (++count_ % period_ == 0) flush();
  }

  void flush() {
    file_ << pending_;
    file_.flush();
    pending_.clear();
    if (!file_) throw IoError(path_.string(), "write failed");
  }

 private:
  fs::path path_;
  std::size_t period_;
  std::size_t count_ = 0;
  std::string pending_;
  std::ofstream file_;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::PDwB: return "pdwb";
    case Method::PD: return "pd";
    case Method::FBwB: return "fbwb";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "pdwb") return Method::PDwB;
  if (name == "pd") return Method::PD;
  if (name == "fbwb") return Method::FBwB;
  throw ConfigError("unknown method '" + name + "' (expected pdwb, pd or fbwb)");
}

const std::vector<std::string>& telemetry_columns() {
  static const std::vector<std::string> cols = {
      "iter", "time_s", "objective", "fidelity", "regularizer", "violation", "mse_I",
      "mse_Q", "mse_U", "beta", "inner_count", "tau", "sigma"};
  return cols;
}

Regularizer ExperimentConfig::effective_regularizer() const {
  const Regularizer paired = method == Method::FBwB ? Regularizer::TVH : Regularizer::TV;
  if (regularizer && *regularizer != paired) {
    throw ConfigError("method " + to_string(method) + " cannot use regularizer " +
                      regularizer_name(*regularizer) +
                      ": pd and pdwb need the nonsmooth tv (handled by its dual prox), fbwb needs the "
                      "differentiable tvh");
  }
  return paired;
}

bool ExperimentConfig::effective_constrained() const {
  return constrained.value_or(method != Method::FBwB);
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig c;
  c.beta0 = beta0;
  c.eta = eta;
  c.r = r;
  c.gamma = gamma;
  c.s = s;
  c.max_outer = max_outer;
  c.max_inner = max_inner;
  c.stop_tol = stop_tol;
  c.time_budget_s = time_budget;
  c.regularizer.lambda = {lambda_i, lambda_qu, lambda_qu};
  c.regularizer.epsilon = epsilon;
  c.regularizer.variant = effective_regularizer();
  c.constrained = effective_constrained();
  c.oracle_beta = oracle_beta;
  if (method == Method::PD && !oracle_beta && !oracle_beta_auto) {
    throw ConfigError("method pd needs oracle_beta (a number, or \"auto\" for a power-iteration estimate)");
  }
  c.validate();
  return c;
}

PhantomSpec ExperimentConfig::phantom() const {
  PhantomSpec spec;
  spec.height = height;
  spec.width = width;
  return spec;
}

void ExperimentConfig::merge_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "cube", "out", "truth", "method", "regularizer", "constrained", "lambda_i", "lambda_qu",
      "epsilon", "beta0", "eta", "r", "gamma", "s", "max_outer", "max_inner", "stop_tol",
      "time_budget", "oracle_beta", "telemetry_period", "snapshot_period", "deterministic",
      "force", "seed", "height", "width", "frames", "fwhm", "sigma_ro"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  std::string text;
  if (j.contains("cube")) { take(j, "cube", text); cube = text; }
  if (j.contains("out")) { take(j, "out", text); out = text; }
  if (j.contains("truth")) {
    if (j["truth"].is_null()) truth.reset();
    else { take(j, "truth", text); truth = fs::path(text); }
  }
  if (j.contains("method")) { take(j, "method", text); method = parse_method(text); }
  if (j.contains("regularizer")) {
    if (j["regularizer"].is_null()) regularizer.reset();
    else { take(j, "regularizer", text); regularizer = parse_regularizer(text); }
  }
  if (j.contains("constrained")) {
    if (j["constrained"].is_null()) constrained.reset();
    else { bool b = true; take(j, "constrained", b); constrained = b; }
  }
  take(j, "lambda_i", lambda_i);
  take(j, "lambda_qu", lambda_qu);
  take(j, "epsilon", epsilon);
  take(j, "beta0", beta0);
  take(j, "eta", eta);
  take(j, "r", r);
  take(j, "gamma", gamma);
  take(j, "s", s);
  take(j, "max_outer", max_outer);
  take(j, "max_inner", max_inner);
  take(j, "stop_tol", stop_tol);
  take(j, "time_budget", time_budget);
  if (j.contains("oracle_beta")) {
    const auto& v = j["oracle_beta"];
    oracle_beta.reset();
    oracle_beta_auto = false;
    if (v.is_string() && v.get<std::string>() == "auto") oracle_beta_auto = true;
    else if (v.is_number()) oracle_beta = v.get<double>();
    else if (!v.is_null()) throw ConfigError("config key 'oracle_beta': expected a number or \"auto\"");
  }
  take(j, "telemetry_period", telemetry_period);
  take(j, "snapshot_period", snapshot_period);
  take(j, "deterministic", deterministic);
  take(j, "force", force);
  take(j, "seed", seed);
  take(j, "height", height);
  take(j, "width", width);
  take(j, "frames", frames);
  take(j, "fwhm", fwhm);
  take(j, "sigma_ro", sigma_ro);
}

json ExperimentConfig::to_json() const {
  json j;
  j["cube"] = cube.string();
  j["out"] = out.string();
  j["truth"] = truth ? json(truth->string()) : json(nullptr);
  j["method"] = to_string(method);
  j["regularizer"] = regularizer ? json(regularizer_name(*regularizer)) : json(nullptr);
  j["constrained"] = constrained ? json(*constrained) : json(nullptr);
  j["lambda_i"] = lambda_i;
  j["lambda_qu"] = lambda_qu;
  j["epsilon"] = epsilon;
  j["beta0"] = beta0;
  j["eta"] = eta;
  j["r"] = r;
  j["gamma"] = gamma;
  j["s"] = s;
  j["max_outer"] = max_outer;
  j["max_inner"] = max_inner;
  j["stop_tol"] = stop_tol;
  j["time_budget"] = time_budget;
  if (oracle_beta_auto) j["oracle_beta"] = "auto";
  else j["oracle_beta"] = oracle_beta ? json(*oracle_beta) : json(nullptr);
  j["telemetry_period"] = telemetry_period;
  j["snapshot_period"] = snapshot_period;
  j["deterministic"] = deterministic;
  j["force"] = force;
  j["seed"] = seed;
  j["height"] = height;
  j["width"] = width;
  j["frames"] = frames;
  j["fwhm"] = fwhm;
  j["sigma_ro"] = sigma_ro;
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path.string(), "cannot open config");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  ExperimentConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.out.empty()) throw ConfigError("simulate: --out is required");
  if (directory_nonempty(cfg.out) && !cfg.force) {
    throw ConfigError("simulate: output directory " + cfg.out.string() +
                      " is not empty (use --force to overwrite)");
  }
  if (fs::exists(cfg.out) && !fs::is_directory(cfg.out)) {
    throw IoError(cfg.out.string(), "exists and is not a directory");
  }
  const auto schedule = dpi_schedule(cfg.frames);
  const ChannelStack truth = make_phantom(cfg.phantom());
  const PsfKernel psf = gaussian_psf(cfg.height, cfg.width, cfg.fwhm);
  const DataCube cube = synthesize(truth, schedule, psf, cfg.sigma_ro, cfg.seed);

  if (cfg.force && fs::exists(cfg.out)) fs::remove_all(cfg.out);
  write_cube(cube, cfg.out);
  const Shape shape = truth.shape();
  for (std::size_t c = 0; c < 3; ++c) {
    const auto plane = truth.plane(c);
    write_stack(ChannelStack(1, shape, std::vector<double>(plane.begin(), plane.end())),
                cfg.out / kTruthNames[c]);
  }
  log << "simulated K=" << cfg.frames << " H=" << cfg.height << " W=" << cfg.width
      << " sigma_ro=" << cfg.sigma_ro << " seed=" << cfg.seed << " -> " << cfg.out.string() << '\n';
}

ChannelStack load_truth(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<ChannelStack> planes;
    for (const char* name : kTruthNames) planes.push_back(read_stack(path / name));
    const Shape shape = planes[0].shape();
    ChannelStack out(3, shape);
    for (std::size_t c = 0; c < 3; ++c) {
      if (planes[c].channels() != 1 || !(planes[c].shape() == shape)) {
        throw FormatError("truth planes in " + path.string() + " disagree in shape");
      }
      std::copy(planes[c].plane(0).begin(), planes[c].plane(0).end(), out.plane(c).begin());
    }
    return out;
  }
  return read_stack(path);
}

ReconstructOutcome cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.cube.empty()) throw ConfigError("reconstruct: cube directory is required");
  if (!fs::is_directory(cfg.cube)) throw IoError(cfg.cube.string(), "cube directory does not exist");
  if (cfg.out.empty()) throw ConfigError("reconstruct: --out is required");
  SolverConfig solver = cfg.solver_config();

  const DataCube cube = read_cube(cfg.cube);
  if (cube.components() != 3) throw DimensionError("reconstruct: expected a 3-component (I, Q, U) cube");

  std::optional<ChannelStack> truth;
  if (cfg.truth) {
    truth = load_truth(*cfg.truth);
  } else if (fs::exists(cfg.cube / kTruthNames[0])) {
    truth = load_truth(cfg.cube);
  }
  if (truth && (truth->channels() != 3 || !(truth->shape() == cube.shape))) {
    throw DimensionError("reconstruct: ground truth shape does not match the cube");
  }

  if (cfg.deterministic) set_thread_cap(1);
  if (cfg.method == Method::PD && cfg.oracle_beta_auto) {
    RngStream rng(cfg.seed);
    solver.oracle_beta = fidelity_lipschitz(cube, rng);
    log << "oracle beta (power iteration): " << format_double(*solver.oracle_beta) << '\n';
  }

  fs::create_directories(cfg.out);
  json effective = cfg.to_json();
  effective["regularizer"] = regularizer_name(solver.regularizer.variant);
  effective["constrained"] = solver.constrained;
  if (solver.oracle_beta) effective["oracle_beta"] = *solver.oracle_beta;
  write_json(effective, cfg.out / "config.json");

  TelemetryWriter telemetry(cfg.out / "telemetry.csv", cfg.telemetry_period);
  SolveOptions opts;
  opts.truth = truth ? &*truth : nullptr;
  opts.record_wall_time = !cfg.deterministic;
  opts.on_record = [&](const TelemetryRecord& r) { telemetry.add(r); };
  opts.snapshot_period = cfg.snapshot_period;
  const fs::path out_dir = cfg.out;
  opts.on_snapshot = [&](std::size_t it, const ChannelStack& x) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%06zu.f64", it);
    write_stack(x, out_dir / name);
  };

  const ChannelStack x0(3, cube.shape);
  ReconstructOutcome outcome;
  try {
    switch (cfg.method) {
      case Method::PDwB:
        outcome.result = pdwb_solve(x0, DualStack(3, cube.shape), cube, solver, opts);
        break;
      case Method::PD:
        outcome.result = pd_solve(x0, DualStack(3, cube.shape), cube, solver, opts);
        break;
      case Method::FBwB:
        outcome.result = fbwb_solve(x0, cube, solver, opts);
        break;
    }
  } catch (...) {
    telemetry.flush();
    throw;
  }
  telemetry.flush();

  const auto& res = outcome.result;
  outcome.status = res.status;
  outcome.exit_code = res.status == SolverStatus::Converged ? kExitConverged : kExitMaxIterations;
  write_stack(res.x, cfg.out / ("recon_" + to_string(cfg.method) + ".f64"));

  json summary;
  summary["method"] = to_string(cfg.method);
  summary["status"] = status_name(res.status);
  summary["iterations"] = res.iterations;
  summary["total_rejections"] = res.total_rejections;
  summary["final_beta"] = res.final_beta;
  summary["wall_time_s"] = res.wall_time_s;
  if (!res.telemetry.empty()) {
    const auto& last = res.telemetry.back();
    summary["objective"] = last.objective;
    summary["fidelity"] = last.fidelity;
    summary["regularizer"] = last.regularizer;
    summary["violation"] = last.violation;
    summary["mse"] = last.mse.empty() ? json(nullptr) : mse_json(last.mse);
  }
  write_json(summary, cfg.out / "summary.json");

  log << to_string(cfg.method) << ": " << status_name(res.status) << " after " << res.iterations
      << " iterations";
  if (!res.telemetry.empty()) log << ", objective " << format_double(res.telemetry.back().objective);
  log << '\n';
  return outcome;
}

json cmd_evaluate(const fs::path& recon_path, const fs::path& truth_path, const EvaluateOptions& options) {
  const ChannelStack recon = read_stack(recon_path);
  const ChannelStack truth = load_truth(truth_path);
  if (!recon.same_layout(truth)) {
    throw DimensionError("evaluate: reconstruction " + recon_path.string() + " and truth " +
                         truth_path.string() + " differ in shape");
  }
  const Shape shape = recon.shape();
  const std::size_t n = shape.pixels();
  const std::size_t L = recon.channels();

  ChannelStack mask(1, shape);
  std::size_t violations = 0;
  std::size_t negative_i = 0;
  double max_violation = 0.0;
  double pol_min = std::numeric_limits<double>::infinity();
  double pol_max = 0.0;
  double pol_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double sq = 0.0;
    for (std::size_t c = 1; c < L; ++c) sq += recon.plane(c)[k] * recon.plane(c)[k];
    const double pol = std::sqrt(sq);
    const double i = recon.plane(0)[k];
    const double v = std::max(0.0, pol - i);
    if (v > options.tolerance) {
      ++violations;
      mask.plane(0)[k] = 1.0;
    }
    max_violation = std::max(max_violation, v);
    if (i < 0.0) ++negative_i;
    pol_min = std::min(pol_min, pol);
    pol_max = std::max(pol_max, pol);
    pol_sum += pol;
  }

  json report;
  report["recon"] = recon_path.string();
  report["truth"] = truth_path.string();
  report["height"] = shape.height;
  report["width"] = shape.width;
  report["mse"] = mse_json(normalized_mse(recon, truth));
  report["violation_tolerance"] = options.tolerance;
  report["violation_count"] = violations;
  report["violation_max"] = max_violation;
  report["negative_intensity_count"] = negative_i;
  report["polarized_intensity"] = {
      {"min", L > 1 ? pol_min : 0.0}, {"max", pol_max}, {"mean", pol_sum / static_cast<double>(n)}};

  const fs::path out_dir = options.out ? *options.out : recon_path.parent_path();
  if (!out_dir.empty()) fs::create_directories(out_dir);
  write_stack(mask, out_dir / "violation_mask.f64");
  write_json(report, out_dir / "report.json");
  return report;
}

void cmd_curves(const std::vector<std::pair<std::string, fs::path>>& inputs, std::ostream& out) {
  if (inputs.empty()) throw ConfigError("curves: at least one telemetry file is required");
  const auto& cols = telemetry_columns();
  std::ostringstream buffer;
  buffer << "run_label,iter,time_s,metric,value\n";
  for (const auto& [label, path] : inputs) {
    std::ifstream f(path);
    if (!f) throw IoError(path.string(), "cannot open telemetry file");
    std::string line;
    if (!std::getline(f, line) || line.empty()) {
      throw FormatError("curves: " + path.string() + " is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_csv(line) != cols) {
      throw FormatError("curves: " + path.string() + " has an unexpected header");
    }
    std::size_t row = 1;
    while (std::getline(f, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != cols.size()) {
        throw FormatError("curves: " + path.string() + " row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " fields");
      }
      for (std::size_t c = 2; c < cols.size(); ++c) {
        buffer << label << ',' << cells[0] << ',' << cells[1] << ',' << cols[c] << ',' << cells[c] << '\n';
      }
    }
  }
  out << buffer.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BacktrackingStallError*>(&e)) return kExitStall;
  if (dynamic_cast<const DivergenceError*>(&e)) return kExitDivergence;
  return kExitUsage;
}

}  // namespace stokes_prox::cli
