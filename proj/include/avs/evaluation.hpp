// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "avs/beamformer.hpp"

namespace avs {

/// y(ℓ, k) = w(ℓ, k)ᴴ x_mask(ℓ, k) for a stream of per-bin weights over the
/// masked channels of `x`.
Spectrogram apply_weights(std::span<const Complex> weights, const ChannelMask& mask, const Spectrogram& x);

/// Time-domain outputs of the filter chain applied to each ground-truth
/// component separately, plus the chain output on the mixture.
struct ComponentOutputs {
  RVector desired;   // d_alg
  RVector noise;     // v_alg
  RVector estimate;  // ŝ
  /// ‖d_alg + v_alg − ŝ‖ / ‖ŝ‖. Zero up to rounding without a post-filter.
  double additivity_residual = 0.0;
};

/// Applies the weights of `result` (and the post-filter gains, when given) to
/// the desired and noise spectrograms. Throws InvalidInput when a component is
/// missing or does not match the result.
ComponentOutputs component_outputs(const EnhancementResult& result, const Spectrogram* desired,
                                   const Spectrogram* noise, std::span<const double> gains = {});

/// 10·log10(½Σ(v_L² + v_R²) / Σv_alg²), capped at ±200 dB.
double noise_reduction_db(std::span<const double> v_left, std::span<const double> v_right,
                          std::span<const double> v_alg);

/// 10·log10(Σ(d_alg − clean)² / Σclean²) with clean = ½(d_L + d_R), capped at
/// ±200 dB. Throws InvalidInput("undefined distortion") on a silent clean signal.
double distortion_db(std::span<const double> d_left, std::span<const double> d_right, std::span<const double> d_alg);

/// Mean per-frame 10·log10(Σestimate² / Σ(estimate − clean)²) over
/// non-overlapping frames whose clean power is within 40 dB of the loudest
/// frame. Per-frame values are clamped to ±clamp_db; a silent output frame
/// scores −clamp_db.
double segmental_snr_db(std::span<const double> clean, std::span<const double> estimate, double sample_rate,
                        double frame_seconds = 0.030, double clamp_db = 35.0);

struct MetricsReport {
  std::string scenario;
  std::string variant;
  double snr_db = 0.0;
  double eta = 0.0;
  double noise_reduction_db = 0.0;
  double distortion_db = 0.0;
  double segmental_snr_db = 0.0;
  double regularization_hit_rate = 0.0;
  double runtime_ms = 0.0;
};

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> rows);

}  // namespace avs
