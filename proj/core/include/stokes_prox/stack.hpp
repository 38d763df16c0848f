#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stokes_prox {

/// Height and width of one image plane.
struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t pixels() const noexcept { return height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// L image planes of equal shape stored contiguously, row-major, plane after plane.
///
/// Holds the Stokes image x = (I, Q, U) and any other per-component quantity
/// (ground truth, gradients of the objective, reconstructions).
class ChannelStack {
 public:
  ChannelStack() = default;
  ChannelStack(std::size_t channels, Shape shape, double fill = 0.0);
  /// Takes ownership of `data`; its length must be channels * pixels.
  ChannelStack(std::size_t channels, Shape shape, std::vector<double> data);

  std::size_t channels() const noexcept { return channels_; }
  Shape shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t pixels() const noexcept { return shape_.pixels(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> plane(std::size_t channel);
  std::span<const double> plane(std::size_t channel) const;

  double& at(std::size_t channel, std::size_t row, std::size_t col) {
    return data_[(channel * shape_.height + row) * shape_.width + col];
  }
  double at(std::size_t channel, std::size_t row, std::size_t col) const {
    return data_[(channel * shape_.height + row) * shape_.width + col];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  bool all_finite() const noexcept;
  bool same_layout(const ChannelStack& other) const noexcept {
    return channels_ == other.channels_ && shape_ == other.shape_;
  }

  friend bool operator==(const ChannelStack&, const ChannelStack&) = default;

 private:
  std::size_t channels_ = 0;
  Shape shape_{};
  std::vector<double> data_;
};

/// Dual variables, one block of length 2N per component (horizontal
/// differences then vertical differences, each row-major).
class DualStack {
 public:
  DualStack() = default;
  DualStack(std::size_t channels, Shape shape, double fill = 0.0);

  std::size_t channels() const noexcept { return channels_; }
  Shape shape() const noexcept { return shape_; }
  std::size_t block_size() const noexcept { return 2 * shape_.pixels(); }

  std::span<double> block(std::size_t channel);
  std::span<const double> block(std::size_t channel) const;

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept;
  friend bool operator==(const DualStack&, const DualStack&) = default;

 private:
  std::size_t channels_ = 0;
  Shape shape_{};
  std::vector<double> data_;
};

// Flat vector helpers shared by the operators and solvers.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> a) noexcept;

}  // namespace stokes_prox
