#include "stokes_prox/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "stokes_prox/errors.hpp"
#include "stokes_prox/parallel.hpp"
#include "stokes_prox/rng.hpp"

namespace stokes_prox {

namespace {

constexpr double kVarianceFloor = 1e-12;

void check_spec(const PhantomSpec& spec) {
  if (spec.height == 0 || spec.width == 0) throw SpecificationError("phantom: empty grid");
  if (!(spec.background >= 0.0)) throw SpecificationError("phantom: background must be >= 0");
  if (!(spec.ring_amplitude >= 0.0)) throw SpecificationError("phantom: ring amplitude must be >= 0");
  if (!(spec.polarized_fraction >= 0.0 && spec.polarized_fraction <= 1.0)) {
    throw SpecificationError("phantom: polarized fraction must lie in [0, 1]; a larger value puts √(Q²+U²) above I");
  }
  if (!(spec.ring_inner >= 0.0 && spec.ring_inner <= spec.ring_outer)) {
    throw SpecificationError("phantom: ring radii must satisfy 0 <= inner <= outer");
  }
  for (const auto& star : spec.stars) {
    if (!(star.amplitude >= 0.0)) throw SpecificationError("phantom: star amplitude must be >= 0");
  }
}

}  // namespace

std::pair<std::size_t, std::size_t> star_pixel(const PhantomSpec& spec, const PointSource& star) {
  const double r = std::round(star.row * static_cast<double>(spec.height));
  const double c = std::round(star.col * static_cast<double>(spec.width));
  if (!(r >= 0.0 && c >= 0.0 && r < static_cast<double>(spec.height) &&
        c < static_cast<double>(spec.width))) {
    throw SpecificationError("phantom: star outside the grid");
  }
  return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
}

double ring_profile(const PhantomSpec& spec, std::size_t row, std::size_t col) {
  const double cy = 0.5 * static_cast<double>(spec.height - 1);
  const double cx = 0.5 * static_cast<double>(spec.width - 1);
  const double half = 0.5 * static_cast<double>(std::min(spec.height, spec.width));
  const double radius = std::hypot(static_cast<double>(row) - cy, static_cast<double>(col) - cx) / half;
  return (radius >= spec.ring_inner && radius <= spec.ring_outer) ? 1.0 : 0.0;
}

ChannelStack make_phantom(const PhantomSpec& spec) {
  check_spec(spec);
  const Shape shape{spec.height, spec.width};
  ChannelStack x(3, shape);
  const double cy = 0.5 * static_cast<double>(spec.height - 1);
  const double cx = 0.5 * static_cast<double>(spec.width - 1);
  const double p = spec.polarized_fraction;
  for (std::size_t i = 0; i < spec.height; ++i) {
    for (std::size_t j = 0; j < spec.width; ++j) {
      const double ring = spec.ring_amplitude * ring_profile(spec, i, j);
      const double theta = std::atan2(static_cast<double>(i) - cy, static_cast<double>(j) - cx);
      x.at(0, i, j) = spec.background + ring;
      x.at(1, i, j) = p * ring * std::cos(2.0 * theta);
      x.at(2, i, j) = p * ring * std::sin(2.0 * theta);
    }
  }
  for (const auto& star : spec.stars) {
    if (star.amplitude == 0.0) continue;
    const auto [r, c] = star_pixel(spec, star);
    x.at(0, r, c) += star.amplitude;
  }
  // cos² + sin² may exceed 1 by an ulp; keep the truth exactly inside the cone.
  const std::size_t n = x.pixels();
  auto v = x.values();
  for (std::size_t k = 0; k < n; ++k) {
    const double pol = std::sqrt(v[n + k] * v[n + k] + v[2 * n + k] * v[2 * n + k]);
    if (pol > v[k]) {
      const double scale = v[k] / pol;
      v[n + k] *= scale;
      v[2 * n + k] *= scale;
    }
  }
  return x;
}

ModulationSchedule dpi_schedule(std::size_t frames) {
  if (frames == 0 || frames % 4 != 0) {
    throw ConfigError("dpi_schedule: frame count " + std::to_string(frames) +
                      " is not a positive multiple of 4");
  }
  // cos 4α and sin 4α for α = 0°, 22.5°, 45°, 67.5°.
  static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
  static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
  ModulationSchedule schedule(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t m = k % 4;
    schedule[k].left = {0.5, 0.5 * kCos[m], 0.5 * kSin[m]};
    schedule[k].right = {0.5, -0.5 * kCos[m], -0.5 * kSin[m]};
  }
  return schedule;
}

PsfKernel gaussian_psf(std::size_t height, std::size_t width, double fwhm) {
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) throw ParameterError("gaussian_psf: fwhm must be > 0");
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const auto ch = static_cast<long>(height / 2);
  const auto cw = static_cast<long>(width / 2);
  std::vector<double> k(height * width);
  double sum = 0.0;
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const auto di = static_cast<double>(static_cast<long>(i) - ch);
      const auto dj = static_cast<double>(static_cast<long>(j) - cw);
      const double v = std::exp(-(di * di + dj * dj) * inv);
      k[i * width + j] = v;
      sum += v;
    }
  }
  for (auto& v : k) v /= sum;
  return PsfKernel(Shape{height, width}, std::move(k));
}

DataCube synthesize(const ChannelStack& truth, const ModulationSchedule& schedule,
                    const PsfKernel& psf, double readout_sigma, std::uint64_t seed,
                    const SynthesisOptions& options) {
  if (!(readout_sigma >= 0.0) || !std::isfinite(readout_sigma)) {
    throw ParameterError("synthesize: readout sigma must be finite and >= 0");
  }
  if (schedule.empty()) throw ConfigError("synthesize: empty modulation schedule");
  if (!truth.all_finite()) throw ParameterError("synthesize: ground truth has non-finite values");

  const Shape shape = truth.shape();
  const std::size_t n = shape.pixels();
  const double readout_variance = readout_sigma * readout_sigma;

  DataCube cube{shape, {}, psf, readout_variance, seed};
  cube.frames.resize(schedule.size());
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    cube.frames[k].left_modulation = schedule[k].left;
    cube.frames[k].right_modulation = schedule[k].right;
  }
  check_compatible(truth, cube);
  const FrameSet means = measure(truth, cube);

  std::vector<std::size_t> floored(schedule.size(), 0);
  const RngStream root(seed);
  parallel_for(
      schedule.size(),
      [&](std::size_t k) {
        auto& f = cube.frames[k];
        f.measurements.resize(2 * n);
        f.weights.resize(2 * n);
        RngStream rng = root.substream(k);
        const auto noise = options.noiseless ? std::vector<double>(2 * n, 0.0)
                                             : gaussian_draws(rng, 2 * n);
        for (std::size_t i = 0; i < 2 * n; ++i) {
          const double m = means[k][i];
          double var = std::max(m, 0.0) + readout_variance;
          if (var < kVarianceFloor) {
            var = kVarianceFloor;
            ++floored[k];
          }
          f.measurements[i] = options.noiseless ? m : m + std::sqrt(var) * noise[i];
          f.weights[i] = 1.0 / var;
        }
      },
      2 * n);

  std::size_t total_floored = 0;
  for (auto c : floored) total_floored += c;
  if (options.floored_weights) *options.floored_weights = total_floored;
  if (total_floored > 0) {
    std::cerr << "warning: " << total_floored
              << " measurement variances floored at 1e-12 (zero readout noise on zero-mean pixels)\n";
  }
  cube.validate();
  return cube;
}

}  // namespace stokes_prox
