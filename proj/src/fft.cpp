// SPDX-License-Identifier: Apache-2.0
#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace avs::detail {

namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  explicit Plans(std::size_t n) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_1d(len, real, spectrum, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(len, spectrum, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
    fftw_free(real);
    fftw_free(spectrum);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>(n)) {
  if (n < 2) throw InvalidInput("FFT length must be at least 2");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> input, std::span<Complex> output) {
  std::copy(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(n_), plans_->real);
  fftw_execute(plans_->forward);
  const std::size_t bins = n_ / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) output[k] = {plans_->spectrum[k][0], plans_->spectrum[k][1]};
}

void RealFft::inverse(std::span<const Complex> input, std::span<double> output) {
  const std::size_t bins = n_ / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) {
    plans_->spectrum[k][0] = input[k].real();
    plans_->spectrum[k][1] = input[k].imag();
  }
  // The DC and Nyquist bins of a real signal carry no imaginary part.
  plans_->spectrum[0][1] = 0.0;
  if (n_ % 2 == 0) plans_->spectrum[bins - 1][1] = 0.0;
  fftw_execute(plans_->inverse);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) output[i] = plans_->real[i] * scale;
}

}  // namespace avs::detail
