// SPDX-License-Identifier: Apache-2.0
#include "avs/signals.hpp"

#include <array>
#include <numbers>
#include <random>

namespace avs {

namespace {

struct Vowel {
  double f1, f2, f3;
};

constexpr std::array<Vowel, 6> kVowels{{
    {730, 1090, 2440},  // a
    {270, 2290, 3010},  // i
    {300, 870, 2240},   // u
    {530, 1840, 2480},  // e
    {570, 840, 2410},   // o
    {660, 1720, 2410},  // ae
}};
constexpr std::array<double, 3> kBandwidths{80.0, 110.0, 160.0};

class Resonator {
 public:
  double step(double x, double freq, double bandwidth, double fs) {
    const double r = std::exp(-std::numbers::pi * bandwidth / fs);
    const double c = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double y = (1.0 - r) * x + c * y1_ - r * r * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0, y2_ = 0.0;
};

double raised_cosine_envelope(std::size_t n, std::size_t length, std::size_t ramp) {
  if (n < ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n) / static_cast<double>(ramp));
  if (n + ramp >= length) {
    const std::size_t tail = length - n;
    return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(tail) / static_cast<double>(ramp));
  }
  return 1.0;
}

/// Adds `seg` at `pos`, scaled to RMS `level`.
void add_segment(RVector& out, std::vector<bool>& active, std::size_t pos, const RVector& seg, double level) {
  double acc = 0.0;
  for (double v : seg) acc += v * v;
  if (acc <= 0.0) return;
  const double scale = level / std::sqrt(acc / static_cast<double>(seg.size()));
  for (std::size_t n = 0; n < seg.size(); ++n) {
    out[pos + n] += scale * seg[n];
    active[pos + n] = true;
  }
}

/// Fourth-order Butterworth high-pass (two cascaded biquads), in place.
void high_pass(RVector& x, double cutoff, double fs) {
  const double k = std::tan(std::numbers::pi * cutoff / fs);
  for (const double q : {0.54119610, 1.30656296}) {
    const double norm = 1.0 / (1.0 + k / q + k * k);
    const double b0 = norm, b1 = -2.0 * norm, b2 = norm;
    const double a1 = 2.0 * (k * k - 1.0) * norm, a2 = (1.0 - k / q + k * k) * norm;
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  }
}

// Fricatives sit roughly 12 dB below vowels.
constexpr double kFricativeLevel = 0.25;

}  // namespace

RVector synthetic_talker(const TalkerParams& p) {
  if (!(p.sample_rate > 0.0) || !(p.duration > 0.0) || !(p.f0 > 0.0)) throw InvalidInput("invalid talker parameters");
  const double fs = p.sample_rate;
  const std::size_t total = static_cast<std::size_t>(std::llround(p.duration * fs));
  RVector out(total, 0.0);
  std::vector<bool> active(total, false);

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

  std::size_t pos = static_cast<std::size_t>(std::llround(p.onset * fs));
  double glottal_phase = 0.0;
  double glottal_lp1 = 0.0, glottal_lp2 = 0.0;
  double prev_source = 0.0;
  std::array<Resonator, 3> tract;

  while (pos < total) {
    const double choice = uni(rng);
    if (choice < 0.12) {
      // Fricative: high-passed noise burst.
      const std::size_t len = static_cast<std::size_t>(uniform(0.06, 0.14) * fs);
      const double centre = uniform(3000.0, 5500.0) * std::min(p.formant_scale, 1.3);
      Resonator band;
      const std::size_t ramp = static_cast<std::size_t>(0.01 * fs);
      RVector seg(std::min(len, total - pos));
      for (std::size_t n = 0; n < seg.size(); ++n)
        seg[n] = raised_cosine_envelope(n, len, ramp) * band.step(gauss(rng), centre, 1500.0, fs);
      add_segment(out, active, pos, seg, kFricativeLevel * uniform(0.6, 1.0));
      pos += len;
    } else {
      // Voiced syllable gliding between two vowels.
      const std::size_t len = static_cast<std::size_t>(uniform(0.12, 0.32) * fs);
      const Vowel a = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
      const Vowel b = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
      const double f0_start = p.f0 * uniform(0.9, 1.15);
      const double f0_end = p.f0 * uniform(0.8, 1.05);
      const double loudness = uniform(0.6, 1.0);
      const std::size_t ramp = static_cast<std::size_t>(0.02 * fs);
      RVector seg(std::min(len, total - pos));
      for (std::size_t n = 0; n < seg.size(); ++n) {
        const double t = static_cast<double>(n) / static_cast<double>(len);
        const double f0 = (f0_start + (f0_end - f0_start) * t) * (1.0 + 0.01 * gauss(rng));
        glottal_phase += f0 / fs;
        double pulse = 0.0;
        if (glottal_phase >= 1.0) {
          glottal_phase -= 1.0;
          pulse = 1.0;
        }
        // Two-pole glottal low-pass (~ -12 dB/oct) with a little aspiration.
        const double g = 0.92;
        glottal_lp1 = g * glottal_lp1 + (1.0 - g) * (pulse + 0.002 * gauss(rng));
        glottal_lp2 = g * glottal_lp2 + (1.0 - g) * glottal_lp1;
        double v = glottal_lp2;
        const std::array<double, 3> formants{(a.f1 + (b.f1 - a.f1) * t) * p.formant_scale,
                                             (a.f2 + (b.f2 - a.f2) * t) * p.formant_scale,
                                             (a.f3 + (b.f3 - a.f3) * t) * p.formant_scale};
        for (std::size_t f = 0; f < 3; ++f) v = tract[f].step(v, formants[f], kBandwidths[f], fs) * 4.0;
        // Lip radiation: first difference.
        const double radiated = v - prev_source;
        prev_source = v;
        seg[n] = raised_cosine_envelope(n, len, ramp) * radiated;
      }
      add_segment(out, active, pos, seg, loudness);
      pos += len;
    }
    // Gap between syllables, occasionally a longer pause.
    pos += static_cast<std::size_t>((uni(rng) < 0.15 ? uniform(0.2, 0.45) : uniform(0.03, 0.09)) * fs);
  }

  // Speech carries next to nothing below ~70 Hz.
  high_pass(out, 70.0, fs);

  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < total; ++n)
    if (active[n]) {
      acc += out[n] * out[n];
      ++count;
    }
  if (count == 0 || acc == 0.0) return out;
  const double scale = p.rms / std::sqrt(acc / static_cast<double>(count));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace avs
