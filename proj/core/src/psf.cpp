#include "stokes_prox/psf.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "stokes_prox/errors.hpp"

namespace stokes_prox {

PsfKernel::PsfKernel(Shape shape, std::vector<double> kernel)
    : shape_(shape), kernel_(std::move(kernel)) {
  if (kernel_.size() != shape_.pixels() || shape_.pixels() == 0) {
    throw DimensionError("PsfKernel: kernel length does not match shape");
  }
  double sum = 0.0;
  for (double v : kernel_) {
    if (!std::isfinite(v) || v < 0.0) throw ParameterError("PsfKernel: entries must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ParameterError("PsfKernel: kernel must sum to 1 (got " + std::to_string(sum) + ")");
  }

  // Move the image-style center to the origin before transforming.
  const std::size_t h = shape_.height;
  const std::size_t w = shape_.width;
  const std::size_t ch = h / 2;
  const std::size_t cw = w / 2;
  std::vector<double> origin(shape_.pixels());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      origin[((i + h - ch) % h) * w + (j + w - cw) % w] = kernel_[i * w + j];
    }
  }
  identity_ = origin[0] == 1.0;
  fft_ = detail::Fft2d::for_shape(shape_);
  transfer_ = fft_->forward(origin);
}

PsfKernel PsfKernel::delta(Shape shape) {
  std::vector<double> k(shape.pixels(), 0.0);
  k[(shape.height / 2) * shape.width + shape.width / 2] = 1.0;
  return PsfKernel(shape, std::move(k));
}

void PsfKernel::apply(std::span<const double> plane, std::span<double> out, bool adjoint) const {
  if (plane.size() != shape_.pixels() || out.size() != shape_.pixels()) {
    throw DimensionError("convolve: plane shape does not match PSF shape");
  }
  if (identity_) {
    std::copy(plane.begin(), plane.end(), out.begin());
    return;
  }
  auto spectrum = fft_->forward(plane);
  if (adjoint) {
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= std::conj(transfer_[i]);
  } else {
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= transfer_[i];
  }
  fft_->inverse(spectrum, out);
}

std::vector<double> convolve(std::span<const double> plane, const PsfKernel& psf, bool adjoint) {
  std::vector<double> out(plane.size());
  psf.apply(plane, out, adjoint);
  return out;
}

}  // namespace stokes_prox
