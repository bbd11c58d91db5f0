// SPDX-License-Identifier: Apache-2.0
#include "avs/postfilter.hpp"

#include <algorithm>
#include <cmath>

namespace avs {

PostfilterParams PostfilterParams::from_db(double beta, double snr_min_db, double w_min_db) {
  PostfilterParams p{beta, db_to_power(snr_min_db), db_to_amplitude(w_min_db)};
  p.validate();
  return p;
}

PostfilterParams PostfilterParams::post1() { return from_db(0.9, -10.0, -8.0); }
PostfilterParams PostfilterParams::post2() { return from_db(0.9, -24.0, -20.0); }

void PostfilterParams::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidInput("post-filter beta must lie in [0, 1)");
  if (!(snr_min > 0.0) || !std::isfinite(snr_min)) throw InvalidInput("post-filter SNR floor must be positive");
  if (!(w_min >= 0.0 && w_min <= 1.0)) throw InvalidInput("post-filter gain floor must lie in [0, 1]");
}

double a_posteriori_ratio(std::span<const Complex> w, std::span<const Complex> x, std::span<const Complex> cov) {
  const std::size_t m = w.size();
  if (x.size() != m || cov.size() != m * m) throw InvalidInput("post-filter operand sizes differ");
  Complex y{};
  for (std::size_t i = 0; i < m; ++i) y += std::conj(w[i]) * x[i];
  Complex q{};
  for (std::size_t i = 0; i < m; ++i) {
    Complex row{};
    for (std::size_t j = 0; j < m; ++j) row += cov[i * m + j] * w[j];
    q += std::conj(w[i]) * row;
  }
  if (!(q.real() > 0.0)) throw NumericalError("degenerate noise power");
  return std::norm(y) / q.real();
}

DecisionDirectedStep decision_directed_step(double previous_gain, double previous_gamma, double gamma,
                                            const PostfilterParams& params) {
  const double snr = params.beta * previous_gain * previous_gain * previous_gamma +
                     (1.0 - params.beta) * std::max(gamma - 1.0, params.snr_min);
  return {snr, std::max(1.0 / (1.0 + 1.0 / snr), params.w_min)};
}

PostfilterResult apply_postfilter(const Spectrogram& beamformed, std::span<const double> noise_power,
                                  const PostfilterParams& params) {
  params.validate();
  if (beamformed.channels() != 1) throw InvalidInput("post-filter expects a single-channel spectrogram");
  const std::size_t frames = beamformed.frames();
  const std::size_t bins = beamformed.bins();
  if (noise_power.size() != frames * bins) throw InvalidInput("post-filter streams are not frame-aligned");

  PostfilterResult result{beamformed, RVector(frames * bins)};
  PostfilterState state(bins);
  for (std::size_t l = 0; l < frames; ++l) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double np = noise_power[l * bins + k];
      if (!(np > 0.0)) throw NumericalError("degenerate noise power");
      Complex& y = result.output.at(l, k, 0);
      const double gamma = std::norm(y) / np;
      const auto step = decision_directed_step(state.gain[k], state.gamma[k], gamma, params);
      state.gain[k] = step.gain;
      state.gamma[k] = gamma;
      result.gains[l * bins + k] = step.gain;
      y *= step.gain;
    }
  }
  return result;
}

}  // namespace avs
