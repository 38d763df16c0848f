#pragma once

#include <stdexcept>
#include <string>

namespace stokes_prox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Files exist but their content is inconsistent (bad sidecar, truncated binary, bad header).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (channel counts, method/regularizer pairing, schedule length).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A phantom description that would violate the Stokes constraint.
class SpecificationError : public Error {
 public:
  using Error::Error;
};

/// An iterate became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// The backtracking loop exceeded its inner-iteration cap.
class BacktrackingStallError : public Error {
 public:
  BacktrackingStallError(std::size_t iteration, double h_candidate, double majorant,
                         double beta_trial);
  std::size_t iteration() const noexcept { return iteration_; }
  double h_candidate() const noexcept { return h_candidate_; }
  double majorant() const noexcept { return majorant_; }
  double beta_trial() const noexcept { return beta_trial_; }

 private:
  std::size_t iteration_;
  double h_candidate_;
  double majorant_;
  double beta_trial_;
};

}  // namespace stokes_prox
