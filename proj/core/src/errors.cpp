#include "stokes_prox/errors.hpp"

#include <sstream>

namespace stokes_prox {

IoError::IoError(const std::string& path, const std::string& what)
    : Error(what + ": " + path), path_(path) {}

DivergenceError::DivergenceError(std::size_t iteration, const std::string& what)
    : Error("divergence at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

namespace {

std::string stall_message(std::size_t iteration, double h_candidate, double majorant,
                          double beta_trial) {
  std::ostringstream os;
  os.precision(17);
  os << "backtracking stalled at iteration " << iteration << ": h(candidate)=" << h_candidate
     << " > majorant=" << majorant << " with beta=" << beta_trial;
  return os.str();
}

}  // namespace

BacktrackingStallError::BacktrackingStallError(std::size_t iteration, double h_candidate,
                                               double majorant, double beta_trial)
    : Error(stall_message(iteration, h_candidate, majorant, beta_trial)),
      iteration_(iteration),
      h_candidate_(h_candidate),
      majorant_(majorant),
      beta_trial_(beta_trial) {}

}  // namespace stokes_prox
