// SPDX-License-Identifier: Apache-2.0
#include "avs/detector.hpp"

#include <algorithm>

namespace avs {

void DetectorParams::validate() const {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw InvalidInput("alpha0 must lie in (0, 1)");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("eta must lie in [0, 1]");
}

double test_statistic(std::span<const Complex> x, std::span<const Complex> h) {
  if (x.size() != h.size()) throw InvalidInput("vector sizes differ");
  double hh = 0.0, xx = 0.0;
  Complex xh{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    hh += std::norm(h[i]);
    xx += std::norm(x[i]);
    xh += std::conj(x[i]) * h[i];
  }
  if (!(hh > 0.0)) throw InvalidInput("invalid steering vector");
  if (xx == 0.0) return 0.0;
  return std::clamp(std::norm(xh) / (xx * hh), 0.0, 1.0);
}

double select_alpha(double t, const DetectorParams& params) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("test statistic outside [0, 1]");
  return t >= params.eta ? 1.0 : params.alpha0;
}

double alpha_to_tau(double alpha0, double sample_rate, double hop) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw InvalidInput("alpha0 must lie in (0, 1)");
  if (!(sample_rate > 0.0) || !(hop > 0.0)) throw InvalidInput("sample rate and hop must be positive");
  return -hop / (sample_rate * std::log(alpha0));
}

double tau_to_alpha(double tau, double sample_rate, double hop) {
  if (!(tau > 0.0)) throw InvalidInput("time constant must be positive");
  if (!(sample_rate > 0.0) || !(hop > 0.0)) throw InvalidInput("sample rate and hop must be positive");
  return std::exp(-hop / (sample_rate * tau));
}

}  // namespace avs
