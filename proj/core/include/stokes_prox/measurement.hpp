#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stokes_prox/psf.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// One acquisition: left beam then right beam (2N values each field).
struct DataFrame {
  std::vector<double> measurements;  ///< d_k
  std::vector<double> weights;       ///< diagonal of W_k, strictly positive
  std::vector<double> left_modulation;   ///< v¹_k, one entry per component
  std::vector<double> right_modulation;  ///< v²_k
};

/// K frames sharing one PSF and one plane shape.
struct DataCube {
  Shape shape;
  std::vector<DataFrame> frames;
  PsfKernel psf;
  double readout_variance = 0.0;
  std::uint64_t seed = 0;

  std::size_t frame_count() const noexcept { return frames.size(); }
  std::size_t components() const noexcept {
    return frames.empty() ? 0 : frames.front().left_modulation.size();
  }

  /// Throws on any broken invariant (K >= 1, shapes, positive finite weights,
  /// complete schedule).
  void validate() const;
};

/// K vectors of length 2N.
using FrameSet = std::vector<std::vector<double>>;

/// Noiseless frames: left_k = Σ_ℓ v¹_{k,ℓ} A x_ℓ, right_k = Σ_ℓ v²_{k,ℓ} A x_ℓ.
FrameSet measure(const ChannelStack& x, const DataCube& cube);

/// Adjoint of measure: component ℓ gets Σ_k Aᵀ(v¹_{k,ℓ} left_k + v²_{k,ℓ} right_k).
ChannelStack measure_adjoint(const FrameSet& frames, const DataCube& cube);

/// Throws ConfigError if x does not match the cube's component count or shape.
void check_compatible(const ChannelStack& x, const DataCube& cube);

}  // namespace stokes_prox
