// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "avs/calibration.hpp"
#include "avs/detector.hpp"

namespace avs {

enum class Algorithm {
  proposed,       // detector-gated adaptive MVDR
  fixed_mvdr,     // noise covariance from a noise-only training segment
  fixed_mpdr,     // covariance of the whole segment, desired speech included
  adaptive_mpdr,  // proposed with eta = 1: every bin updates the estimate
  oracle_mvdr,    // adaptive estimate driven by the true noise component
  unprocessed,    // reference combination cᴴx
};

std::string_view to_string(Algorithm algorithm);
/// Throws InvalidInput on unknown names.
Algorithm parse_algorithm(std::string_view name);

/// Subset of array channels the beamformer uses.
class ChannelMask {
 public:
  static ChannelMask full(std::size_t channels = kArrayChannels);
  /// Reduced array: the two pressure channels only.
  static ChannelMask monopoles();
  explicit ChannelMask(std::vector<std::size_t> channels);

  std::span<const std::size_t> channels() const { return channels_; }
  std::size_t size() const { return channels_.size(); }
  bool is_identity(std::size_t total) const;
  friend bool operator==(const ChannelMask&, const ChannelMask&) = default;

 private:
  std::vector<std::size_t> channels_;
};

struct BeamformerParams {
  double rho = 15.0;
  DetectorParams detector;
  Algorithm algorithm = Algorithm::proposed;
  ChannelMask mask = ChannelMask::full();
  /// Length of the noise-only lead-in the fixed MVDR trains on.
  double training_seconds = 1.0;
  /// Reference combination the unprocessed variant outputs.
  ReferenceCombiner combiner = ReferenceCombiner::omni_average();

  void validate() const;
};

/// Running per-bin noise covariance estimate Φ̂(ℓ, k).
struct CovarianceState {
  BinMatrices cov;
  std::size_t frame = 0;
};

/// Φ ← αΦ + (1 − α)xxᴴ on one bin; α = 1 leaves Φ untouched.
void update_covariance(std::span<Complex> cov, std::span<const Complex> x, double alpha);

/// Minimizes wᴴΦw subject to wᴴh = 1 via a Cholesky solve. A covariance whose
/// condition estimate exceeds 1e12 gets 1e-10·trace/M of diagonal loading and
/// one retry; NumericalError if that also fails.
CVector mvdr_weights(std::span<const Complex> cov, std::span<const Complex> h);

/// Scales w onto the ball ‖w‖₂ ≤ rho. Returns true when scaling happened.
bool regularize(std::span<Complex> w, double rho);

struct PipelineDiagnostics {
  RVector test_statistic;           // frames * bins
  RVector alpha;                    // frames * bins
  RVector weight_norm;              // frames * bins, after regularization
  std::vector<std::uint8_t> regularized;  // frames * bins
  double max_distortionless_error = 0.0;  // max |wᴴh − 1| before regularization
  std::size_t loading_retries = 0;

  double regularization_hit_rate() const;
};

struct EnhancementResult {
  Spectrogram output;  // y(ℓ, k), single channel
  ChannelMask mask = ChannelMask::full();
  std::size_t weight_size = 0;
  CVector weights;     // frames * bins * weight_size, w_reg(ℓ, k) over the masked channels
  RVector noise_power; // frames * bins, w_regᴴ Φ̂ w_reg
  PipelineDiagnostics diagnostics;

  std::span<const Complex> weights_at(std::size_t l, std::size_t k) const {
    return {weights.data() + (l * output.bins() + k) * weight_size, weight_size};
  }
};

/// Runs the selected beamformer over every frame in ascending order. Per bin:
/// test statistic, smoothing choice, covariance update, MVDR weights, norm
/// constraint, and y = wᴴx. `noise_truth` is the STFT of the true noise
/// component and is required by the oracle variant only.
EnhancementResult run_pipeline(const Spectrogram& mixture, const Spectrogram* noise_truth, const RtfVector& rtf,
                               const NoiseFloorCovariance& noise_floor, const BeamformerParams& params);

}  // namespace avs
