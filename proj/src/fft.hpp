// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>

#include "avs/common.hpp"

namespace avs::detail {

/// Real-input FFT of fixed length n backed by FFTW. Not shareable across
/// threads; create one per worker.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }

  /// input: n samples; output: n/2 + 1 bins. Unnormalized.
  void forward(std::span<const double> input, std::span<Complex> output);
  /// input: n/2 + 1 bins; output: n samples, scaled by 1/n.
  void inverse(std::span<const Complex> input, std::span<double> output);

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace avs::detail
