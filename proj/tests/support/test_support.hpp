#pragma once

// Helpers and independent oracles shared by the unit tests and the
// acceptance binary. Nothing here calls the code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "stokes_prox/measurement.hpp"
#include "stokes_prox/psf.hpp"
#include "stokes_prox/rng.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox::testing {

inline ChannelStack random_stack(RngStream& rng, std::size_t channels, Shape shape, double lo = -1.0,
                                 double hi = 1.0) {
  return ChannelStack(channels, shape, uniform_draws(rng, channels * shape.pixels(), lo, hi));
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double inner(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Random positive kernel with unit sum.
inline PsfKernel random_psf(RngStream& rng, Shape shape) {
  auto k = uniform_draws(rng, shape.pixels(), 0.0, 1.0);
  double sum = 0.0;
  for (double v : k) sum += v;
  for (auto& v : k) v /= sum;
  return PsfKernel(shape, std::move(k));
}

/// Cube with random modulations, positive weights and random data.
inline DataCube random_cube(RngStream& rng, Shape shape, std::size_t frames, std::size_t components,
                            bool delta_psf = false) {
  DataCube cube{shape, {}, delta_psf ? PsfKernel::delta(shape) : random_psf(rng, shape), 1.0, 0};
  const std::size_t n = shape.pixels();
  for (std::size_t k = 0; k < frames; ++k) {
    DataFrame f;
    f.left_modulation = uniform_draws(rng, components, -1.0, 1.0);
    f.right_modulation = uniform_draws(rng, components, -1.0, 1.0);
    f.measurements = uniform_draws(rng, 2 * n, -2.0, 2.0);
    f.weights = uniform_draws(rng, 2 * n, 0.5, 2.0);
    cube.frames.push_back(std::move(f));
  }
  return cube;
}

/// Direct O(N²) circular convolution, kernel origin at (H/2, W/2).
inline std::vector<double> direct_convolution(std::span<const double> x, std::span<const double> kernel,
                                              Shape shape, bool adjoint) {
  const auto H = static_cast<long>(shape.height);
  const auto W = static_cast<long>(shape.width);
  auto wrap = [](long v, long m) { return ((v % m) + m) % m; };
  std::vector<double> out(shape.pixels(), 0.0);
  for (long i = 0; i < H; ++i) {
    for (long j = 0; j < W; ++j) {
      double acc = 0.0;
      for (long p = 0; p < H; ++p) {
        for (long q = 0; q < W; ++q) {
          const long di = p - H / 2;
          const long dj = q - W / 2;
          const long si = adjoint ? wrap(i + di, H) : wrap(i - di, H);
          const long sj = adjoint ? wrap(j + dj, W) : wrap(j - dj, W);
          acc += kernel[static_cast<std::size_t>(p * W + q)] * x[static_cast<std::size_t>(si * W + sj)];
        }
      }
      out[static_cast<std::size_t>(i * W + j)] = acc;
    }
  }
  return out;
}

/// Dense Neumann forward-difference matrix (2N × N), dx rows then dy rows.
inline std::vector<std::vector<double>> dense_gradient(Shape shape) {
  const std::size_t H = shape.height, W = shape.width, N = shape.pixels();
  std::vector<std::vector<double>> D(2 * N, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const std::size_t n = i * W + j;
      if (j + 1 < W) {
        D[n][n] = -1.0;
        D[n][n + 1] = 1.0;
      }
      if (i + 1 < H) {
        D[N + n][n] = -1.0;
        D[N + n][n + W] = 1.0;
      }
    }
  }
  return D;
}

/// Projection of (t, z1, z2) onto {‖z‖ <= t} by numerical minimization.
///
/// Cone points are written a·(1, s cos φ, s sin φ) with a >= 0, s ∈ [0, 1].
/// For fixed (s, φ) the best a is closed form, leaving a 2-D search: a dense
/// grid followed by repeated local zooming.
struct ConePoint {
  double t, z1, z2;
};

inline ConePoint brute_force_soc(double t, double z1, double z2) {
  auto eval = [&](double s, double phi, ConePoint* p) {
    const double u1 = s * std::cos(phi);
    const double u2 = s * std::sin(phi);
    const double a = std::max(0.0, (t + u1 * z1 + u2 * z2) / (1.0 + s * s));
    const double e0 = a - t, e1 = a * u1 - z1, e2 = a * u2 - z2;
    if (p) *p = {a, a * u1, a * u2};
    return e0 * e0 + e1 * e1 + e2 * e2;
  };
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr int ns = 101, nphi = 256;
  double best = INFINITY, bs = 0.0, bphi = 0.0;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nphi; ++j) {
      const double s = static_cast<double>(i) / (ns - 1);
      const double phi = two_pi * j / nphi;
      const double f = eval(s, phi, nullptr);
      if (f < best) best = f, bs = s, bphi = phi;
    }
  }
  double ws = 1.0 / (ns - 1), wphi = two_pi / nphi;
  for (int round = 0; round < 48; ++round) {
    const double cs = bs, cphi = bphi;
    for (int i = -5; i <= 5; ++i) {
      for (int j = -5; j <= 5; ++j) {
        const double s = std::clamp(cs + ws * i / 5.0, 0.0, 1.0);
        const double phi = cphi + wphi * j / 5.0;
        const double f = eval(s, phi, nullptr);
        if (f < best) best = f, bs = s, bphi = phi;
      }
    }
    ws *= 0.5;
    wphi *= 0.5;
  }
  ConePoint p{};
  eval(bs, bphi, &p);
  return p;
}

/// Central difference of f along direction d at x.
inline double directional_fd(const std::function<double(const ChannelStack&)>& f, const ChannelStack& x,
                             const ChannelStack& d, double step) {
  ChannelStack plus = x, minus = x;
  axpy(step, d.values(), plus.values());
  axpy(-step, d.values(), minus.values());
  return (f(plus) - f(minus)) / (2.0 * step);
}

}  // namespace stokes_prox::testing
