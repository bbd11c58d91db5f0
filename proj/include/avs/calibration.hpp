// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "avs/bin_arrays.hpp"
#include "avs/stft.hpp"

namespace avs {

/// Linear combination c defining the reference signal s̃ = cᴴ h_d s. The same
/// c applies to every bin.
struct ReferenceCombiner {
  CVector c;

  /// ½[1 0 0 0 1 0 0 0]ᵀ, the mean of the two pressure channels.
  static ReferenceCombiner omni_average();
  /// Selects one channel of an m-channel array.
  static ReferenceCombiner select(std::size_t m, std::size_t channel);

  void validate() const;
  ReferenceCombiner restricted(std::span<const std::size_t> channels) const;
};

/// Steering vector relative to the reference combination, cᴴh = 1 per bin.
class RtfVector : public BinVectors {
 public:
  using BinVectors::BinVectors;
  explicit RtfVector(BinVectors v) : BinVectors(std::move(v)) {}
};

/// Time-averaged sensor-noise covariance per bin.
class NoiseFloorCovariance : public BinMatrices {
 public:
  using BinMatrices::BinMatrices;
  explicit NoiseFloorCovariance(BinMatrices m) : BinMatrices(std::move(m)) {}
};

struct RtfEstimate {
  RtfVector rtf;
  /// Bins without reference energy, filled from the nearest valid bin.
  std::size_t invalid_bins = 0;
};

/// (1/L)·Σ_ℓ a aᴴ per bin over a sensor-noise-only recording.
NoiseFloorCovariance estimate_sensor_noise(const Spectrogram& noise_only);

/// Σ_ℓ b (bᴴc) / Σ_ℓ |cᴴb|² per bin for each recording, averaged over the
/// recordings and renormalized so that cᴴh = 1.
RtfEstimate estimate_rtf(std::span<const Spectrogram> recordings, const ReferenceCombiner& combiner);

/// Everything the enhancer needs from the offline calibration step.
struct CalibrationArtifact {
  StftConfig config;
  ReferenceCombiner combiner;
  RtfVector rtf;
  NoiseFloorCovariance noise_floor;
  std::size_t invalid_bins = 0;
};

/// Versioned little-endian binary container. Throws IoError on I/O failures.
void save_calibration(const CalibrationArtifact& artifact, const std::filesystem::path& path);

/// Throws InvalidInput when the stored STFT configuration differs from
/// `expected`, IoError when the file is unreadable or malformed.
CalibrationArtifact load_calibration(const std::filesystem::path& path, const StftConfig& expected);

}  // namespace avs
