// SPDX-License-Identifier: Apache-2.0
#include <numbers>

#include "avs/stft.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace avs;

namespace {

double interior_error_db(const RVector& x, const RVector& y, std::size_t edge) {
  double err = 0.0, ref = 0.0;
  for (std::size_t n = edge; n + edge < y.size(); ++n) {
    err += (x[n] - y[n]) * (x[n] - y[n]);
    ref += x[n] * x[n];
  }
  return 10.0 * std::log10(err / ref);
}

}  // namespace

TEST_CASE("default configuration yields 513 bins") {
  StftConfig c;
  CHECK(c.num_bins() == 513);
  CHECK(c.bin_frequency(512) == doctest::Approx(8000.0));
}

TEST_CASE("invalid configurations are rejected") {
  StftConfig c;
  c.hop = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.hop = 100;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.fft_length = 256;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("signal shorter than a window is rejected") {
  CHECK_THROWS_AS(analyze(RVector(511, 1.0), StftConfig{}), InvalidInput);
}

TEST_CASE("DC frame concentrates in bin 0") {
  const StftConfig c;
  const Spectrogram s = analyze(RVector(512, 1.0), c);
  REQUIRE(s.frames() == 1);
  const RVector w = hamming_window(512);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(std::abs(s.at(0, 0, 0)) == doctest::Approx(sum).epsilon(1e-12));
  // Zero-padding to 1024 puts the DC mainlobe edge at bin 2 (4 bins wide); beyond it only sidelobes remain.
  for (std::size_t k = 4; k < s.bins(); ++k) CHECK(std::abs(s.at(0, k, 0)) < 0.01 * sum);
}

TEST_CASE("bin-centred tone peaks at its bin") {
  const StftConfig c;
  const std::size_t bin = 96;
  RVector x(2048);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::cos(2.0 * std::numbers::pi * c.bin_frequency(bin) * n / c.sample_rate);
  const Spectrogram s = analyze(x, c);
  for (std::size_t l = 0; l < s.frames(); ++l) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.bins(); ++k)
      if (std::abs(s.at(l, k, 0)) > std::abs(s.at(l, best, 0))) best = k;
    CHECK(best == bin);
    double in_lobe = 0.0, total = 0.0;
    for (std::size_t k = 0; k < s.bins(); ++k) {
      const double p = std::norm(s.at(l, k, 0));
      total += p;
      if (k + 4 >= bin && k <= bin + 4) in_lobe += p;
    }
    CHECK(in_lobe / total > 0.999);
  }
}

TEST_CASE("round trip of white noise is exact on the interior") {
  std::mt19937_64 rng(7);
  const StftConfig c;
  const RVector x = test::white(rng, 16000);
  const RVector y = synthesize(analyze(x, c));
  REQUIRE(y.size() == covered_length(frame_count(x.size(), c), c));
  CHECK(interior_error_db(x, y, c.window_length / 2) <= -80.0);
}

TEST_CASE("round trip also covers the edges of the covered span") {
  // Normalizing by the overlapped squared window makes every covered sample exact.
  std::mt19937_64 rng(8);
  const StftConfig c;
  const RVector x = test::white(rng, 4000);
  const RVector y = synthesize(analyze(x, c));
  CHECK(interior_error_db(x, y, 0) <= -200.0);
}

TEST_CASE("round trip of a speech-shaped burst") {
  std::mt19937_64 rng(9);
  const StftConfig c;
  RVector x = test::white(rng, 16000);
  // One-pole low-pass tilt plus an amplitude envelope.
  double state = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    state = 0.95 * state + 0.05 * x[n];
    x[n] = state * (0.2 + std::sin(std::numbers::pi * n / x.size()));
  }
  const RVector y = synthesize(analyze(x, c));
  CHECK(interior_error_db(x, y, c.window_length / 2) <= -80.0);
}

TEST_CASE("zero spectrogram synthesizes to zero") {
  const StftConfig c;
  const Spectrogram s(c, 10, 1);
  for (double v : synthesize(s)) CHECK(v == 0.0);
}

TEST_CASE("analysis is linear") {
  std::mt19937_64 rng(10);
  const StftConfig c;
  const RVector a = test::white(rng, 3000), b = test::white(rng, 3000);
  RVector sum(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) sum[n] = 2.0 * a[n] - 0.5 * b[n];
  const Spectrogram sa = analyze(a, c), sb = analyze(b, c), ss = analyze(sum, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < ss.data().size(); ++i)
    worst = std::max(worst, std::abs(ss.data()[i] - (2.0 * sa.data()[i] - 0.5 * sb.data()[i])));
  CHECK(worst < 1e-10);
}

TEST_CASE("Parseval per frame") {
  std::mt19937_64 rng(11);
  const StftConfig c;
  const RVector x = test::white(rng, 1024);
  const Spectrogram s = analyze(x, c);
  const RVector w = hamming_window(c.window_length);
  for (std::size_t l = 0; l < s.frames(); ++l) {
    double time = 0.0;
    for (std::size_t n = 0; n < c.window_length; ++n) time += std::pow(w[n] * x[l * c.hop + n], 2);
    double freq = std::norm(s.at(l, 0, 0)) + std::norm(s.at(l, s.bins() - 1, 0));
    for (std::size_t k = 1; k + 1 < s.bins(); ++k) freq += 2.0 * std::norm(s.at(l, k, 0));
    CHECK(freq / c.fft_length == doctest::Approx(time).epsilon(1e-10));
  }
}

TEST_CASE("multichannel analysis matches per-channel analysis") {
  std::mt19937_64 rng(12);
  const StftConfig c;
  const MultiSignal x{test::white(rng, 2000), test::white(rng, 2000), test::white(rng, 2000)};
  const Spectrogram all = analyze(x, c);
  for (std::size_t m = 0; m < x.size(); ++m) {
    const Spectrogram one = analyze(x[m], c);
    for (std::size_t l = 0; l < one.frames(); ++l)
      for (std::size_t k = 0; k < one.bins(); ++k) CHECK(all.at(l, k, m) == one.at(l, k, 0));
  }
  const std::array<std::size_t, 2> pick{2, 0};
  const Spectrogram sub = all.select_channels(pick);
  CHECK(sub.at(3, 40, 0) == all.at(3, 40, 2));
  CHECK(sub.at(3, 40, 1) == all.at(3, 40, 0));
  const std::array<std::size_t, 1> bad{5};
  CHECK_THROWS_AS(all.select_channels(bad), InvalidInput);
}

TEST_CASE("channels of unequal length are rejected") {
  CHECK_THROWS_AS(analyze(MultiSignal{RVector(600), RVector(700)}, StftConfig{}), InvalidInput);
}
