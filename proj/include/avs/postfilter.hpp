// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "avs/stft.hpp"

namespace avs {

/// Decision-directed Wiener post-filter settings, in linear units.
struct PostfilterParams {
  double beta = 0.9;
  double snr_min = db_to_power(-10.0);   // power ratio
  double w_min = db_to_amplitude(-8.0);  // amplitude

  /// snr_min_db converts as a power ratio, w_min_db as an amplitude.
  static PostfilterParams from_db(double beta, double snr_min_db, double w_min_db);
  /// β = 0.9, SNR_min = −10 dB, W_min = −8 dB.
  static PostfilterParams post1();
  /// β = 0.9, SNR_min = −24 dB, W_min = −20 dB.
  static PostfilterParams post2();

  void validate() const;
};

/// Per-bin memory: previous gain and previous a-posteriori ratio.
struct PostfilterState {
  RVector gain;
  RVector gamma;

  explicit PostfilterState(std::size_t bins) : gain(bins, 1.0), gamma(bins, 0.0) {}
};

/// |wᴴx|² / (wᴴΦw). Throws NumericalError("degenerate noise power") when the
/// denominator is not positive.
double a_posteriori_ratio(std::span<const Complex> w, std::span<const Complex> x, std::span<const Complex> cov);

struct DecisionDirectedStep {
  double snr_estimate = 0.0;
  double gain = 1.0;
};

/// SNR = β·Ŵ_prev²·γ_prev + (1 − β)·max{γ − 1, SNR_min}; gain
/// max{1/(1 + 1/SNR), W_min}.
DecisionDirectedStep decision_directed_step(double previous_gain, double previous_gamma, double gamma,
                                            const PostfilterParams& params);

struct PostfilterResult {
  Spectrogram output;
  RVector gains;  // frames * bins
};

/// Filters a single-channel beamformer output. `noise_power` holds wᴴΦ̂w for
/// every frame and bin, aligned with `beamformed`.
PostfilterResult apply_postfilter(const Spectrogram& beamformed, std::span<const double> noise_power,
                                  const PostfilterParams& params);

}  // namespace avs
