// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "avs/common.hpp"

namespace avs {

struct DetectorParams {
  double eta = 0.9;      // detection threshold on T
  double alpha0 = 0.98;  // covariance smoothing when no speech is detected

  void validate() const;
};

/// Squared cosine of the angle between x and h: |xᴴh|² / (‖x‖²‖h‖²), in
/// [0, 1]. A zero x yields 0 (treated as speech absent).
double test_statistic(std::span<const Complex> x, std::span<const Complex> h);

/// 1 (freeze the noise estimate) when T ≥ eta, otherwise alpha0.
double select_alpha(double t, const DetectorParams& params);

/// τ = −R / (F_s ln α₀), in seconds.
double alpha_to_tau(double alpha0, double sample_rate, double hop);
/// α₀ = exp(−R / (F_s τ)).
double tau_to_alpha(double tau, double sample_rate, double hop);

}  // namespace avs
