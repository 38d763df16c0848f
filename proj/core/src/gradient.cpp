#include "stokes_prox/gradient.hpp"

#include <cmath>
#include <numbers>

#include "stokes_prox/errors.hpp"

namespace stokes_prox {

void grad_forward(std::span<const double> plane, Shape shape, std::span<double> field) {
  const std::size_t h = shape.height;
  const std::size_t w = shape.width;
  const std::size_t n = shape.pixels();
  if (plane.size() != n || field.size() != 2 * n) {
    throw DimensionError("grad_forward: size mismatch");
  }
  auto dx = field.first(n);
  auto dy = field.last(n);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t row = i * w;
    for (std::size_t j = 0; j + 1 < w; ++j) dx[row + j] = plane[row + j + 1] - plane[row + j];
    dx[row + w - 1] = 0.0;
  }
  for (std::size_t i = 0; i + 1 < h; ++i) {
    const std::size_t row = i * w;
    for (std::size_t j = 0; j < w; ++j) dy[row + j] = plane[row + w + j] - plane[row + j];
  }
  for (std::size_t j = 0; j < w; ++j) dy[(h - 1) * w + j] = 0.0;
}

GradientField grad_forward(std::span<const double> plane, Shape shape) {
  GradientField f{shape, std::vector<double>(2 * shape.pixels())};
  grad_forward(plane, shape, f.values);
  return f;
}

void grad_adjoint(std::span<const double> field, Shape shape, std::span<double> plane) {
  const std::size_t h = shape.height;
  const std::size_t w = shape.width;
  const std::size_t n = shape.pixels();
  if (plane.size() != n || field.size() != 2 * n) {
    throw DimensionError("grad_adjoint: size mismatch");
  }
  auto dx = field.first(n);
  auto dy = field.last(n);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t k = i * w + j;
      double v = 0.0;
      if (j + 1 < w) v -= dx[k];
      if (j > 0) v += dx[k - 1];
      if (i + 1 < h) v -= dy[k];
      if (i > 0) v += dy[k - w];
      plane[k] = v;
    }
  }
}

std::vector<double> grad_adjoint(const GradientField& field) {
  std::vector<double> out(field.shape.pixels());
  grad_adjoint(field.values, field.shape, out);
  return out;
}

double gradient_norm(Shape shape) {
  auto top = [](std::size_t n) {
    const double c = std::cos(std::numbers::pi / (2.0 * static_cast<double>(n)));
    return 4.0 * c * c;
  };
  return std::sqrt(top(shape.width) + top(shape.height));
}

void grad_forward(const ChannelStack& x, DualStack& out) {
  if (out.channels() != x.channels() || out.shape() != x.shape()) out = DualStack(x.channels(), x.shape());
  for (std::size_t c = 0; c < x.channels(); ++c) grad_forward(x.plane(c), x.shape(), out.block(c));
}

void grad_adjoint(const DualStack& y, ChannelStack& out) {
  if (out.channels() != y.channels() || out.shape() != y.shape()) out = ChannelStack(y.channels(), y.shape());
  for (std::size_t c = 0; c < y.channels(); ++c) grad_adjoint(y.block(c), y.shape(), out.plane(c));
}

}  // namespace stokes_prox
