// SPDX-License-Identifier: Apache-2.0
#include "avs/config.hpp"
#include "avs/experiment.hpp"
#include "doctest.h"

using namespace avs;

namespace {

ExperimentParams short_params() {
  ExperimentParams p;
  p.scenario.duration = 3.0;
  return p;
}

struct Fixture {
  ExperimentParams params = short_params();
  CalibrationArtifact calibration = calibrate(make_calibration_recordings(params), params.stft);
  PreparedScenario prepare(std::string_view name, double snr) const {
    return prepare_scenario(make_scenario(params, name, snr), std::string(name), snr);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

double power(const RVector& x, std::size_t from) {
  double s = 0.0;
  for (std::size_t n = from; n < x.size(); ++n) s += x[n] * x[n];
  return s;
}

}  // namespace

TEST_CASE("variant labels round trip") {
  for (const char* label : {"proposed", "fixed_mvdr", "fixed_mpdr", "adaptive_mpdr", "oracle_mvdr", "unprocessed",
                            "proposed_ra", "fixed_mvdr_ra+post1", "proposed+post2", "unprocessed+post1"})
    CHECK(parse_variant(label).label() == label);
  const Variant v = parse_variant("oracle_mvdr_ra+post2");
  CHECK(v.algorithm == Algorithm::oracle_mvdr);
  CHECK(v.reduced_array);
  CHECK(v.postfilter == PostfilterChoice::post2);
  CHECK_THROWS_AS(parse_variant("proposed+post3"), InvalidInput);
  CHECK_THROWS_AS(parse_variant(""), InvalidInput);
}

TEST_CASE("derived seeds differ per stream and are stable") {
  CHECK(derive_seed(1, 1) == derive_seed(1, 1));
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
}

TEST_CASE("scenario synthesis hits the target SNR and is deterministic") {
  const auto& f = fixture();
  for (double snr : {0.0, -12.5}) {
    const GroundTruthMix mix = synthesize_scenario(make_scenario(f.params, "static", snr));
    const double measured =
        10.0 * std::log10(omni_average_power(mix.desired_component) / omni_average_power(mix.noise_component));
    CHECK(std::abs(measured - snr) <= 0.01);
  }
  const GroundTruthMix a = synthesize_scenario(make_scenario(f.params, "moving", 0.0));
  const GroundTruthMix b = synthesize_scenario(make_scenario(f.params, "moving", 0.0));
  CHECK(a.mixture == b.mixture);
  CHECK_THROWS_AS(make_scenario(f.params, "office", 0.0), InvalidInput);
}

TEST_CASE("the preamble is free of desired speech") {
  const auto& f = fixture();
  const GroundTruthMix mix = synthesize_scenario(make_scenario(f.params, "static", 0.0));
  const auto preamble = static_cast<std::size_t>(f.params.scenario.preamble * f.params.stft.sample_rate);
  for (const auto& ch : mix.desired_component)
    for (std::size_t n = 0; n < preamble; ++n) REQUIRE(ch[n] == 0.0);
}

TEST_CASE("calibration of the experiment recordings") {
  const auto& f = fixture();
  const auto& cal = f.calibration;
  CHECK(cal.rtf.bins() == 513);
  for (auto z : cal.rtf.data()) REQUIRE(std::isfinite(std::abs(z)));
  for (std::size_t k = 0; k < cal.rtf.bins(); ++k) {
    Complex ref = 0.0;
    for (std::size_t m = 0; m < 8; ++m) ref += std::conj(cal.combiner.c[m]) * cal.rtf.at(k)[m];
    REQUIRE(std::abs(ref - 1.0) <= 1e-6);
  }
}

TEST_CASE("detector freezes the estimate on desired speech") {
  // Feed the desired component alone: the detector should flag the bins that carry speech.
  const auto& f = fixture();
  const PreparedScenario s = f.prepare("static", 0.0);
  const EnhancementResult r = run_pipeline(s.desired, nullptr, f.calibration.rtf, f.calibration.noise_floor,
                                           f.params.beamformer);
  std::size_t flagged = 0, counted = 0;
  for (std::size_t l = 0; l < s.desired.frames(); ++l) {
    double frame_energy = 0.0;
    for (std::size_t k = 0; k < s.desired.bins(); ++k)
      for (std::size_t m = 0; m < 8; ++m) frame_energy += std::norm(s.desired.at(l, k, m));
    if (frame_energy == 0.0) continue;
    for (std::size_t k = 0; k < s.desired.bins(); ++k) {
      double e = 0.0;
      for (std::size_t m = 0; m < 8; ++m) e += std::norm(s.desired.at(l, k, m));
      if (e < 0.01 * frame_energy) continue;
      ++counted;
      flagged += r.diagnostics.alpha[l * s.desired.bins() + k] == 1.0;
    }
  }
  REQUIRE(counted > 1000);
  CHECK(static_cast<double>(flagged) / static_cast<double>(counted) >= 0.9);
}

TEST_CASE("adaptive MPDR cancels the desired speech at high SNR") {
  const auto& f = fixture();
  const PreparedScenario s = f.prepare("static", 10.0);
  const VariantRun proposed = run_variant(s, f.calibration, parse_variant("proposed"), 0.9, f.params);
  const VariantRun mpdr = run_variant(s, f.calibration, parse_variant("adaptive_mpdr"), 0.9, f.params);
  const auto start = static_cast<std::size_t>(f.params.scenario.preamble * f.params.stft.sample_rate);
  CHECK(power(mpdr.components.desired, start) < power(proposed.components.desired, start));
}

TEST_CASE("post-filtering lowers the output noise power") {
  const auto& f = fixture();
  const PreparedScenario s = f.prepare("static", 0.0);
  const VariantRun plain = run_variant(s, f.calibration, parse_variant("proposed"), 0.9, f.params);
  const VariantRun post = run_variant(s, f.calibration, parse_variant("proposed+post2"), 0.9, f.params);
  CHECK(power(post.components.noise, 0) < power(plain.components.noise, 0));
  CHECK(post.components.additivity_residual < 1e-9);
}

TEST_CASE("unprocessed reference") {
  const auto& f = fixture();
  const PreparedScenario s = f.prepare("static", 0.0);
  const VariantRun r = run_variant(s, f.calibration, parse_variant("unprocessed"), 0.9, f.params);
  CHECK(r.metrics.noise_reduction_db == 0.0);
  CHECK(r.metrics.distortion_db < -100.0);
}

TEST_CASE("sweep rows follow the axes and repeat eta-free variants") {
  ExperimentParams p = short_params();
  p.scenario.duration = 2.0;
  SweepAxes axes;
  axes.scenarios = {"static"};
  axes.snr_db = {0.0};
  axes.eta = {0.8, 0.9};
  axes.variants = {"proposed", "fixed_mvdr"};
  const auto rows = run_sweep(p, axes);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variant == "proposed");
  CHECK(rows[0].eta == 0.8);
  CHECK(rows[3].eta == 0.9);
  CHECK(rows[1].noise_reduction_db == rows[3].noise_reduction_db);
  CHECK(rows[0].noise_reduction_db != rows[2].noise_reduction_db);
  for (const auto& r : rows) CHECK(parse_variant(r.variant).label() == r.variant);
  axes.eta = {};
  CHECK_THROWS_AS(run_sweep(p, axes), InvalidInput);
}
