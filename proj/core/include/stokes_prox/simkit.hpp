#pragma once

#include <array>
#include <utility>
#include <cstdint>
#include <vector>

#include "stokes_prox/measurement.hpp"
#include "stokes_prox/psf.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// Unpolarized star; position as fractions of the image height and width.
struct PointSource {
  double row = 0.0;
  double col = 0.0;
  double amplitude = 0.0;
};

/// Synthetic circumstellar scene: a ring with azimuthal linear polarization,
/// two unpolarized point stars and a flat unpolarized background.
struct PhantomSpec {
  std::size_t height = 64;
  std::size_t width = 64;
  double ring_inner = 0.25;  ///< inner radius as a fraction of min(H, W) / 2
  double ring_outer = 0.55;  ///< outer radius, same unit
  double ring_amplitude = 60.0;
  double polarized_fraction = 0.6;  ///< p in [0, 1]
  std::array<PointSource, 2> stars{{{0.31, 0.34, 500.0}, {0.66, 0.63, 300.0}}};
  double background = 0.3;  ///< >= 0
};

/// Pixel holding a star: fractional position scaled to the grid and rounded.
std::pair<std::size_t, std::size_t> star_pixel(const PhantomSpec& spec, const PointSource& star);

/// 1 inside the ring band, 0 elsewhere.
double ring_profile(const PhantomSpec& spec, std::size_t row, std::size_t col);

/// I = background + ring + stars, Q = p·ring·cos 2θ, U = p·ring·sin 2θ, with θ
/// the azimuth about the image center. Throws SpecificationError when the
/// result would leave the cone or have negative intensity.
ChannelStack make_phantom(const PhantomSpec& spec);

/// Modulation pair of one acquisition: left and right beam coefficients.
struct Modulation {
  std::vector<double> left;
  std::vector<double> right;
};
using ModulationSchedule = std::vector<Modulation>;

/// Half-wave-plate cycle α ∈ {0°, 22.5°, 45°, 67.5°}:
/// v¹ = ½(1, cos 4α, sin 4α), v² = ½(1, −cos 4α, −sin 4α).
/// Throws ConfigError unless K is a positive multiple of 4.
ModulationSchedule dpi_schedule(std::size_t frames);

/// Periodic Gaussian centered at (H/2, W/2), normalized to unit sum.
PsfKernel gaussian_psf(std::size_t height, std::size_t width, double fwhm);

struct SynthesisOptions {
  bool noiseless = false;  ///< skip the Gaussian draws (test hook)
  std::size_t* floored_weights = nullptr;  ///< receives the count of floored variances
};

/// Noisy frames d_k = m_k + √(max(m_k, 0) + σ_ro²)·n_k with m_k the
/// noiseless measurement of `truth`, and weights 1 / (max(m_k, 0) + σ_ro²)
/// floored at 1e-12 in the denominator (a warning goes to stderr when the
/// floor is hit). Frame k draws from substream seed ^ k.
DataCube synthesize(const ChannelStack& truth, const ModulationSchedule& schedule,
                    const PsfKernel& psf, double readout_sigma, std::uint64_t seed,
                    const SynthesisOptions& options = {});

}  // namespace stokes_prox
