#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <utility>

#include "stokes_prox/errors.hpp"

namespace stokes_prox::detail {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

struct Fft2d::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

Fft2d::Fft2d(Shape shape) : shape_(shape), plans_(std::make_unique<Plans>()) {
  if (shape.pixels() == 0) throw DimensionError("Fft2d: empty shape");
  const int h = static_cast<int>(shape.height);
  const int w = static_cast<int>(shape.width);
  auto real = fftw_buffer<double>(shape.pixels());
  auto spec = fftw_buffer<fftw_complex>(spectrum_size());
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c_2d(h, w, real.get(), spec.get(), FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r_2d(h, w, spec.get(), real.get(), FFTW_ESTIMATE);
  if (plans_->r2c == nullptr || plans_->c2r == nullptr) {
    throw Error("Fft2d: FFTW planning failed");
  }
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

std::vector<std::complex<double>> Fft2d::forward(std::span<const double> plane) const {
  if (plane.size() != shape_.pixels()) throw DimensionError("Fft2d::forward: plane size mismatch");
  auto real = fftw_buffer<double>(shape_.pixels());
  auto spec = fftw_buffer<fftw_complex>(spectrum_size());
  std::memcpy(real.get(), plane.data(), sizeof(double) * plane.size());
  fftw_execute_dft_r2c(plans_->r2c, real.get(), spec.get());
  std::vector<std::complex<double>> out(spectrum_size());
  std::memcpy(static_cast<void*>(out.data()), spec.get(), sizeof(fftw_complex) * out.size());
  return out;
}

void Fft2d::inverse(std::span<const std::complex<double>> spectrum, std::span<double> out) const {
  if (spectrum.size() != spectrum_size() || out.size() != shape_.pixels()) {
    throw DimensionError("Fft2d::inverse: size mismatch");
  }
  auto real = fftw_buffer<double>(shape_.pixels());
  // c2r overwrites its input.
  auto spec = fftw_buffer<fftw_complex>(spectrum_size());
  std::memcpy(spec.get(), spectrum.data(), sizeof(fftw_complex) * spectrum.size());
  fftw_execute_dft_c2r(plans_->c2r, spec.get(), real.get());
  const double scale = 1.0 / static_cast<double>(shape_.pixels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] * scale;
}

std::shared_ptr<const Fft2d> Fft2d::for_shape(Shape shape) {
  static std::mutex cache_mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Fft2d>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{shape.height, shape.width}];
  if (!slot) slot = std::make_shared<const Fft2d>(shape);
  return slot;
}

}  // namespace stokes_prox::detail
