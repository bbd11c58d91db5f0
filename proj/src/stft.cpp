// SPDX-License-Identifier: Apache-2.0
#include "avs/stft.hpp"

#include <numbers>

#include "fft.hpp"

namespace avs {

void StftConfig::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw InvalidInput("sample rate must be positive");
  if (window_length == 0 || hop == 0) throw InvalidInput("window length and hop must be positive");
  if (window_length % hop != 0) throw InvalidInput("hop must divide the window length");
  if (fft_length < window_length) throw InvalidInput("FFT length must be at least the window length");
}

RVector hamming_window(std::size_t length) {
  RVector w(length, 1.0);
  if (length < 2) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
  return w;
}

std::size_t frame_count(std::size_t samples, const StftConfig& config) {
  if (samples < config.window_length) return 0;
  return (samples - config.window_length) / config.hop + 1;
}

std::size_t covered_length(std::size_t frames, const StftConfig& config) {
  if (frames == 0) return 0;
  return (frames - 1) * config.hop + config.window_length;
}

Spectrogram::Spectrogram(const StftConfig& config, std::size_t frames, std::size_t channels)
    : config_(config),
      frames_(frames),
      bins_(config.num_bins()),
      channels_(channels),
      data_(frames * config.num_bins() * channels) {}

Spectrogram Spectrogram::select_channels(std::span<const std::size_t> channels) const {
  for (std::size_t c : channels)
    if (c >= channels_) throw InvalidInput("channel index out of range");
  Spectrogram out(config_, frames_, channels.size());
  for (std::size_t l = 0; l < frames_; ++l)
    for (std::size_t k = 0; k < bins_; ++k) {
      auto src = vector(l, k);
      auto dst = out.vector(l, k);
      for (std::size_t i = 0; i < channels.size(); ++i) dst[i] = src[channels[i]];
    }
  return out;
}

Spectrogram analyze(const MultiSignal& signal, const StftConfig& config) {
  config.validate();
  if (signal.empty()) throw InvalidInput("no channels to analyze");
  const std::size_t length = signal.front().size();
  for (const auto& ch : signal)
    if (ch.size() != length) throw InvalidInput("channels differ in length");
  if (length < config.window_length) throw InvalidInput("insufficient samples");

  const std::size_t frames = frame_count(length, config);
  const std::size_t bins = config.num_bins();
  const std::size_t channels = signal.size();
  const RVector window = hamming_window(config.window_length);

  Spectrogram out(config, frames, channels);
  detail::RealFft fft(config.fft_length);
  RVector buffer(config.fft_length, 0.0);
  CVector spectrum(bins);
  for (std::size_t m = 0; m < channels; ++m) {
    const auto& x = signal[m];
    for (std::size_t l = 0; l < frames; ++l) {
      const std::size_t start = l * config.hop;
      for (std::size_t n = 0; n < config.window_length; ++n) buffer[n] = window[n] * x[start + n];
      fft.forward(buffer, spectrum);
      for (std::size_t k = 0; k < bins; ++k) out.at(l, k, m) = spectrum[k];
    }
  }
  return out;
}

Spectrogram analyze(std::span<const double> mono, const StftConfig& config) {
  return analyze(MultiSignal{std::vector<double>(mono.begin(), mono.end())}, config);
}

RVector synthesize(const Spectrogram& spectrogram) {
  if (spectrogram.channels() != 1) throw InvalidInput("synthesis requires a single-channel spectrogram");
  const StftConfig& config = spectrogram.config();
  config.validate();
  const std::size_t frames = spectrogram.frames();
  const std::size_t length = covered_length(frames, config);
  RVector out(length, 0.0);
  if (frames == 0) return out;

  const RVector window = hamming_window(config.window_length);
  RVector norm(length, 0.0);
  detail::RealFft fft(config.fft_length);
  RVector buffer(config.fft_length);
  for (std::size_t l = 0; l < frames; ++l) {
    fft.inverse(spectrogram.frame(l), buffer);
    const std::size_t start = l * config.hop;
    for (std::size_t n = 0; n < config.window_length; ++n) {
      out[start + n] += window[n] * buffer[n];
      norm[start + n] += window[n] * window[n];
    }
  }
  for (std::size_t i = 0; i < length; ++i) out[i] /= norm[i];
  return out;
}

}  // namespace avs
