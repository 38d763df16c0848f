#include "stokes_prox/stack.hpp"

#include <algorithm>
#include <cmath>

#include "stokes_prox/errors.hpp"

namespace stokes_prox {

ChannelStack::ChannelStack(std::size_t channels, Shape shape, double fill)
    : channels_(channels), shape_(shape), data_(channels * shape.pixels(), fill) {}

ChannelStack::ChannelStack(std::size_t channels, Shape shape, std::vector<double> data)
    : channels_(channels), shape_(shape), data_(std::move(data)) {
  if (data_.size() != channels_ * shape_.pixels()) {
    throw DimensionError("ChannelStack: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(channels_) + "x" +
                         std::to_string(shape_.height) + "x" + std::to_string(shape_.width));
  }
}

std::span<double> ChannelStack::plane(std::size_t channel) {
  return std::span<double>(data_).subspan(channel * pixels(), pixels());
}

std::span<const double> ChannelStack::plane(std::size_t channel) const {
  return std::span<const double>(data_).subspan(channel * pixels(), pixels());
}

bool ChannelStack::all_finite() const noexcept { return stokes_prox::all_finite(data_); }

DualStack::DualStack(std::size_t channels, Shape shape, double fill)
    : channels_(channels), shape_(shape), data_(channels * 2 * shape.pixels(), fill) {}

std::span<double> DualStack::block(std::size_t channel) {
  return std::span<double>(data_).subspan(channel * block_size(), block_size());
}

std::span<const double> DualStack::block(std::size_t channel) const {
  return std::span<const double>(data_).subspan(channel * block_size(), block_size());
}

bool DualStack::all_finite() const noexcept { return stokes_prox::all_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("squared_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace stokes_prox
