// SPDX-License-Identifier: Apache-2.0
#include "avs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "avs/kernels.hpp"

namespace avs {

namespace {

void require_equal_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw InvalidInput("metric inputs differ in length");
}

double energy(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

Spectrogram apply_weights(std::span<const Complex> weights, const ChannelMask& mask, const Spectrogram& x) {
  const std::size_t m = mask.size();
  const std::size_t frames = x.frames();
  const std::size_t bins = x.bins();
  if (weights.size() != frames * bins * m) throw InvalidInput("weight stream does not match the spectrogram");
  for (std::size_t ch : mask.channels())
    if (ch >= x.channels()) throw InvalidInput("channel mask does not match the spectrogram");
  const bool identity = mask.is_identity(x.channels());
  const Spectrogram selected = identity ? Spectrogram{} : x.select_channels(mask.channels());
  const Spectrogram& src = identity ? x : selected;

  Spectrogram out(x.config(), frames, 1);
  const auto& kern = kernels::active();
  for (std::size_t l = 0; l < frames; ++l)
    kern.inner_products(weights.data() + l * bins * m, src.frame(l).data(), out.frame(l).data(), bins, m);
  return out;
}

ComponentOutputs component_outputs(const EnhancementResult& result, const Spectrogram* desired,
                                   const Spectrogram* noise, std::span<const double> gains) {
  if (desired == nullptr || noise == nullptr) throw InvalidInput("component outputs need the ground-truth components");
  const std::size_t frames = result.output.frames();
  const std::size_t bins = result.output.bins();
  for (const Spectrogram* s : {desired, noise})
    if (s->frames() != frames || s->bins() != bins) throw InvalidInput("ground truth does not match the result");
  if (!gains.empty() && gains.size() != frames * bins) throw InvalidInput("gain stream is not frame-aligned");

  Spectrogram d = apply_weights(result.weights, result.mask, *desired);
  Spectrogram v = apply_weights(result.weights, result.mask, *noise);
  Spectrogram y = result.output;
  if (!gains.empty()) {
    for (std::size_t i = 0; i < frames * bins; ++i) {
      d.data()[i] *= gains[i];
      v.data()[i] *= gains[i];
      y.data()[i] *= gains[i];
    }
  }

  ComponentOutputs out;
  out.desired = synthesize(d);
  out.noise = synthesize(v);
  out.estimate = synthesize(y);
  double residual = 0.0;
  for (std::size_t n = 0; n < out.estimate.size(); ++n) {
    const double e = out.desired[n] + out.noise[n] - out.estimate[n];
    residual += e * e;
  }
  const double norm = energy(out.estimate);
  out.additivity_residual = norm > 0.0 ? std::sqrt(residual / norm) : std::sqrt(residual);
  return out;
}

double noise_reduction_db(std::span<const double> v_left, std::span<const double> v_right,
                          std::span<const double> v_alg) {
  require_equal_lengths(v_left.size(), v_right.size(), v_alg.size());
  return power_ratio_db(0.5 * (energy(v_left) + energy(v_right)), energy(v_alg));
}

double distortion_db(std::span<const double> d_left, std::span<const double> d_right, std::span<const double> d_alg) {
  require_equal_lengths(d_left.size(), d_right.size(), d_alg.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < d_alg.size(); ++n) {
    const double clean = 0.5 * (d_left[n] + d_right[n]);
    const double e = d_alg[n] - clean;
    num += e * e;
    den += clean * clean;
  }
  if (!(den > 0.0)) throw InvalidInput("undefined distortion");
  return power_ratio_db(num, den);
}

double segmental_snr_db(std::span<const double> clean, std::span<const double> estimate, double sample_rate,
                        double frame_seconds, double clamp_db) {
  if (clean.size() != estimate.size()) throw InvalidInput("metric inputs differ in length");
  const auto frame = static_cast<std::size_t>(std::lround(frame_seconds * sample_rate));
  if (frame == 0) throw InvalidInput("segmental SNR frame is empty");
  const std::size_t count = clean.size() / frame;

  // Frames are picked by clean power; the ratio is output power over error power, so a silent output scores the floor.
  RVector signal(count), output(count), error(count);
  for (std::size_t f = 0; f < count; ++f) {
    for (std::size_t n = f * frame; n < (f + 1) * frame; ++n) {
      const double e = clean[n] - estimate[n];
      signal[f] += clean[n] * clean[n];
      output[f] += estimate[n] * estimate[n];
      error[f] += e * e;
    }
  }
  const double peak = count > 0 ? *std::max_element(signal.begin(), signal.end()) : 0.0;
  const double threshold = peak * 1e-4;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < count; ++f) {
    if (!(signal[f] > threshold)) continue;
    double snr = clamp_db;
    if (output[f] == 0.0) snr = -clamp_db;
    else if (error[f] > 0.0) snr = 10.0 * std::log10(output[f] / error[f]);
    sum += std::clamp(snr, -clamp_db, clamp_db);
    ++used;
  }
  if (used == 0) throw InvalidInput("no voiced frames for segmental SNR");
  return sum / static_cast<double>(used);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> rows) {
  out << "scenario,variant,snr_db,eta,noise_reduction_db,distortion_db,segmental_snr_db,"
         "regularization_hit_rate,runtime_ms\n";
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.variant << ',' << r.snr_db << ',' << r.eta << ',' << r.noise_reduction_db << ','
        << r.distortion_db << ',' << r.segmental_snr_db << ',' << r.regularization_hit_rate << ','
        << std::setprecision(3) << std::fixed << r.runtime_ms << std::defaultfloat << std::setprecision(10) << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace avs
