#pragma once

#include <span>
#include <vector>

#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// Forward differences of one plane: 2N values, horizontal field (dx) first,
/// vertical field (dy) second, both row-major.
struct GradientField {
  Shape shape;
  std::vector<double> values;

  std::span<double> dx() { return std::span<double>(values).first(shape.pixels()); }
  std::span<double> dy() { return std::span<double>(values).last(shape.pixels()); }
  std::span<const double> dx() const { return std::span<const double>(values).first(shape.pixels()); }
  std::span<const double> dy() const { return std::span<const double>(values).last(shape.pixels()); }
};

/// Neumann forward differences: dx[i,j] = x[i,j+1] - x[i,j] (0 in the last
/// column), dy[i,j] = x[i+1,j] - x[i,j] (0 in the last row).
GradientField grad_forward(std::span<const double> plane, Shape shape);
void grad_forward(std::span<const double> plane, Shape shape, std::span<double> field);

/// Exact adjoint of grad_forward (negative divergence).
std::vector<double> grad_adjoint(const GradientField& field);
void grad_adjoint(std::span<const double> field, Shape shape, std::span<double> plane);

/// Exact spectral norm of grad_forward on a grid,
/// sqrt(4 cos²(π / 2W) + 4 cos²(π / 2H)) <= sqrt(8).
double gradient_norm(Shape shape);

/// Applies grad_forward to every channel of a stack.
void grad_forward(const ChannelStack& x, DualStack& out);
/// Applies grad_adjoint block-wise, overwriting `out`.
void grad_adjoint(const DualStack& y, ChannelStack& out);

}  // namespace stokes_prox
