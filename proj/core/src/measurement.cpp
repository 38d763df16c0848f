#include "stokes_prox/measurement.hpp"

#include <cmath>
#include <string>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/parallel.hpp"

namespace stokes_prox {

void DataCube::validate() const {
  if (frames.empty()) throw ConfigError("DataCube: at least one frame is required");
  if (psf.shape() != shape) throw DimensionError("DataCube: PSF shape differs from frame shape");
  if (!(readout_variance >= 0.0) || !std::isfinite(readout_variance)) {
    throw ParameterError("DataCube: readout variance must be finite and >= 0");
  }
  const std::size_t len = 2 * shape.pixels();
  const std::size_t comps = components();
  if (comps == 0) throw ConfigError("DataCube: empty modulation schedule");
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    const std::string tag = "DataCube frame " + std::to_string(k) + ": ";
    if (f.measurements.size() != len || f.weights.size() != len) {
      throw DimensionError(tag + "expected " + std::to_string(len) + " values");
    }
    if (f.left_modulation.size() != comps || f.right_modulation.size() != comps) {
      throw ConfigError(tag + "modulation coefficients missing for some component");
    }
    if (!all_finite(f.measurements) || !all_finite(f.left_modulation) ||
        !all_finite(f.right_modulation)) {
      throw FormatError(tag + "non-finite value");
    }
    for (double w : f.weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError(tag + "weights must be finite and > 0");
    }
  }
}

void check_compatible(const ChannelStack& x, const DataCube& cube) {
  if (x.channels() != cube.components()) {
    throw ConfigError("stack has " + std::to_string(x.channels()) +
                      " components but the modulation schedule has " +
                      std::to_string(cube.components()));
  }
  if (x.shape() != cube.shape) throw DimensionError("stack shape differs from cube shape");
}

FrameSet measure(const ChannelStack& x, const DataCube& cube) {
  check_compatible(x, cube);
  const std::size_t n = x.pixels();
  const std::size_t comps = x.channels();

  ChannelStack blurred(comps, x.shape());
  parallel_for(
      comps, [&](std::size_t c) { cube.psf.apply(x.plane(c), blurred.plane(c)); }, n);

  FrameSet out(cube.frames.size(), std::vector<double>(2 * n, 0.0));
  parallel_for(
      cube.frames.size(),
      [&](std::size_t k) {
        const auto& f = cube.frames[k];
        auto left = std::span<double>(out[k]).first(n);
        auto right = std::span<double>(out[k]).last(n);
        for (std::size_t c = 0; c < comps; ++c) {
          const auto b = blurred.plane(c);
          const double v1 = f.left_modulation[c];
          const double v2 = f.right_modulation[c];
          if (v1 != 0.0) axpy(v1, b, left);
          if (v2 != 0.0) axpy(v2, b, right);
        }
      },
      n * comps);
  return out;
}

ChannelStack measure_adjoint(const FrameSet& frames, const DataCube& cube) {
  if (frames.size() != cube.frames.size()) {
    throw DimensionError("measure_adjoint: expected " + std::to_string(cube.frames.size()) +
                         " frames");
  }
  const std::size_t n = cube.shape.pixels();
  for (const auto& u : frames) {
    if (u.size() != 2 * n) throw DimensionError("measure_adjoint: frame length mismatch");
  }
  const std::size_t comps = cube.components();

  // Per-component accumulation runs over k in a fixed order.
  ChannelStack acc(comps, cube.shape);
  ChannelStack out(comps, cube.shape);
  parallel_for(
      comps,
      [&](std::size_t c) {
        auto a = acc.plane(c);
        for (std::size_t k = 0; k < frames.size(); ++k) {
          const auto& f = cube.frames[k];
          const auto u = std::span<const double>(frames[k]);
          const double v1 = f.left_modulation[c];
          const double v2 = f.right_modulation[c];
          if (v1 != 0.0) axpy(v1, u.first(n), a);
          if (v2 != 0.0) axpy(v2, u.last(n), a);
        }
        cube.psf.apply(a, out.plane(c), /*adjoint=*/true);
      },
      n * frames.size());
  return out;
}

}  // namespace stokes_prox
