// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "avs/common.hpp"

namespace avs {

enum class WindowKind { hamming };

struct StftConfig {
  double sample_rate = 16000.0;
  std::size_t window_length = 512;
  std::size_t hop = 128;
  std::size_t fft_length = 1024;
  WindowKind window = WindowKind::hamming;

  std::size_t num_bins() const { return fft_length / 2 + 1; }
  double bin_frequency(std::size_t k) const { return sample_rate * static_cast<double>(k) / fft_length; }
  /// Throws InvalidInput when the configuration cannot frame a signal.
  void validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// Symmetric Hamming window, 0.54 - 0.46 cos(2πn/(N-1)).
RVector hamming_window(std::size_t length);

/// Number of full frames that fit in `samples`; zero when shorter than a window.
std::size_t frame_count(std::size_t samples, const StftConfig& config);

/// Number of samples covered by `frames` frames.
std::size_t covered_length(std::size_t frames, const StftConfig& config);

/// One-sided multichannel STFT, stored frame-major with the channel vector of
/// each bin contiguous: data[(frame * bins + bin) * channels + channel].
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(const StftConfig& config, std::size_t frames, std::size_t channels);

  const StftConfig& config() const { return config_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return channels_; }

  Complex& at(std::size_t frame, std::size_t bin, std::size_t channel) {
    return data_[(frame * bins_ + bin) * channels_ + channel];
  }
  const Complex& at(std::size_t frame, std::size_t bin, std::size_t channel) const {
    return data_[(frame * bins_ + bin) * channels_ + channel];
  }

  /// All bins of one frame, bins * channels values.
  std::span<Complex> frame(std::size_t l) { return {data_.data() + l * bins_ * channels_, bins_ * channels_}; }
  std::span<const Complex> frame(std::size_t l) const {
    return {data_.data() + l * bins_ * channels_, bins_ * channels_};
  }

  /// The channel vector x(l, k).
  std::span<Complex> vector(std::size_t l, std::size_t k) {
    return {data_.data() + (l * bins_ + k) * channels_, channels_};
  }
  std::span<const Complex> vector(std::size_t l, std::size_t k) const {
    return {data_.data() + (l * bins_ + k) * channels_, channels_};
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  /// Copy of the listed channels, in the listed order.
  Spectrogram select_channels(std::span<const std::size_t> channels) const;

 private:
  StftConfig config_;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::size_t channels_ = 0;
  CVector data_;
};

/// Frame-by-frame windowed FFT of every channel. Processing starts at the first
/// full window; no edge padding is applied.
Spectrogram analyze(const MultiSignal& signal, const StftConfig& config);
Spectrogram analyze(std::span<const double> mono, const StftConfig& config);

/// Weighted overlap-add inverse of a single-channel spectrogram. The output is
/// normalized by the overlapped product of analysis and synthesis windows, so
/// analyze followed by synthesize reproduces every covered sample.
RVector synthesize(const Spectrogram& spectrogram);

}  // namespace avs
