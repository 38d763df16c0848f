#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "stokes_prox/stack.hpp"

namespace stokes_prox {

namespace detail {
class Fft2d;
}

/// Point-spread function of the blur operator A.
///
/// The kernel plane is stored image-style with its origin at pixel
/// (height / 2, width / 2). Convolution is circular; the transfer function is
/// computed once at construction.
class PsfKernel {
 public:
  /// Throws ParameterError unless the kernel is finite, nonnegative and sums
  /// to 1 within 1e-12.
  PsfKernel(Shape shape, std::vector<double> kernel);

  /// Centered unit impulse: A = Id.
  static PsfKernel delta(Shape shape);

  Shape shape() const noexcept { return shape_; }
  std::span<const double> kernel() const noexcept { return kernel_; }
  std::span<const std::complex<double>> transfer() const noexcept { return transfer_; }
  /// True for a centered unit impulse; apply() then copies exactly.
  bool is_identity() const noexcept { return identity_; }

  /// A x (or Aᵀ x with adjoint = true) written into `out`.
  void apply(std::span<const double> plane, std::span<double> out, bool adjoint = false) const;

 private:
  Shape shape_;
  std::vector<double> kernel_;
  std::shared_ptr<const detail::Fft2d> fft_;
  std::vector<std::complex<double>> transfer_;
  bool identity_ = false;
};

/// Circular convolution with the PSF; the adjoint applies the conjugate
/// transfer function (correlation).
std::vector<double> convolve(std::span<const double> plane, const PsfKernel& psf,
                             bool adjoint = false);

}  // namespace stokes_prox
