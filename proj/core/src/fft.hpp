#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "stokes_prox/stack.hpp"

namespace stokes_prox::detail {

/// Real-to-complex 2-D transform pair over one plane shape (FFTW, estimate-mode
/// plans). Plans are created once; execution uses the new-array interface and
/// is safe to call concurrently.
class Fft2d {
 public:
  explicit Fft2d(Shape shape);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  Shape shape() const noexcept { return shape_; }
  /// Number of complex coefficients, height * (width / 2 + 1).
  std::size_t spectrum_size() const noexcept { return shape_.height * (shape_.width / 2 + 1); }

  std::vector<std::complex<double>> forward(std::span<const double> plane) const;
  /// Unnormalized inverse scaled by 1/N, so inverse(forward(x)) == x.
  void inverse(std::span<const std::complex<double>> spectrum, std::span<double> out) const;

  /// Shared transform for a shape, cached per process.
  static std::shared_ptr<const Fft2d> for_shape(Shape shape);

 private:
  struct Plans;
  Shape shape_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace stokes_prox::detail
