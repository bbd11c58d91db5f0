// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero when any of them fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "avs/array_model.hpp"
#include "avs/detector.hpp"
#include "avs/experiment.hpp"
#include "avs/stft.hpp"
#include "support.hpp"

using namespace avs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Prepared scenarios and variant runs, computed once and shared by criteria.
class Runs {
 public:
  explicit Runs(ExperimentParams params)
      : params_(std::move(params)), calibration_(calibrate(make_calibration_recordings(params_), params_.stft)) {}

  const ExperimentParams& params() const { return params_; }

  const PreparedScenario& scenario(const std::string& name, double snr) {
    const auto key = std::make_pair(name, snr);
    auto it = scenarios_.find(key);
    if (it == scenarios_.end())
      it = scenarios_.emplace(key, prepare_scenario(make_scenario(params_, name, snr), name, snr)).first;
    return it->second;
  }

  VariantRun run(const std::string& name, double snr, const std::string& variant, double eta = 0.9) {
    return run_variant(scenario(name, snr), calibration_, parse_variant(variant), eta, params_);
  }

  const MetricsReport& metrics(const std::string& name, double snr, const std::string& variant, double eta = 0.9) {
    const std::string key = fmt("%s|%g|%s|%g", name.c_str(), snr, variant.c_str(), eta);
    auto it = metrics_.find(key);
    if (it == metrics_.end()) it = metrics_.emplace(key, run(name, snr, variant, eta).metrics).first;
    return it->second;
  }

  const std::map<std::string, MetricsReport>& all() const { return metrics_; }

 private:
  ExperimentParams params_;
  CalibrationArtifact calibration_;
  std::map<std::pair<std::string, double>, PreparedScenario> scenarios_;
  std::map<std::string, MetricsReport> metrics_;
};

void stft_round_trip() {
  const auto start = Clock::now();
  const StftConfig c;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> length(4000, 32000);
  const std::size_t guard = c.window_length / 2;
  double worst = -400.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RVector x = test::white(rng, length(rng));
    const RVector y = synthesize(analyze(x, c));
    double err = 0.0, ref = 0.0;
    for (std::size_t n = guard; n + guard < y.size(); ++n) {
      err += (x[n] - y[n]) * (x[n] - y[n]);
      ref += x[n] * x[n];
    }
    worst = std::max(worst, err > 0.0 ? 10.0 * std::log10(err / ref) : -400.0);
  }
  const double t = seconds_since(start);
  report(1, worst <= -80.0 && t < 1.0, fmt("worst interior error %.1f dB, %.2f s", worst, t));
}

void mvdr_optimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  double worst_constraint = 0.0;
  std::size_t beaten = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CVector cov = test::random_pd(rng, 8);
    const CVector h = test::random_vector(rng, 8);
    const CVector w = mvdr_weights(cov, h);
    worst_constraint = std::max(worst_constraint, std::abs(test::dot(w, h) - 1.0));
    const double best = test::quad(w, cov);
    const double hh = test::dot(h, h).real();
    for (int n = 0; n < 1000; ++n) {
      // Project a random vector onto the affine set vᴴh = 1.
      CVector v = test::random_vector(rng, 8);
      const Complex fix = (1.0 - test::dot(h, v)) / hh;
      for (std::size_t i = 0; i < 8; ++i) v[i] += h[i] * fix;
      if (test::quad(v, cov) < best * (1.0 - 1e-12)) ++beaten;
    }
  }
  const double t = seconds_since(start);
  report(2, worst_constraint <= 1e-8 && beaten == 0 && t < 10.0,
         fmt("max |w^H h - 1| %.2e, %zu feasible vectors below the optimum, %.2f s", worst_constraint, beaten, t));
}

void moving_trend(Runs& runs) {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (double snr : {-20.0, -10.0, 0.0}) {
    const double p = runs.metrics("moving", snr, "proposed").noise_reduction_db;
    const double f = runs.metrics("moving", snr, "fixed_mvdr").noise_reduction_db;
    pass = pass && p >= f + 3.0;
    detail += fmt("%g dB: %.1f vs %.1f; ", snr, p, f);
  }
  const double t = seconds_since(start);
  report(3, pass && t < 60.0, detail + fmt("%.1f s", t));
}

void mpdr_degradation(Runs& runs) {
  const auto start = Clock::now();
  const double nr_low = runs.metrics("static", -20.0, "adaptive_mpdr").noise_reduction_db;
  const double nr_high = runs.metrics("static", 10.0, "adaptive_mpdr").noise_reduction_db;
  const double d_mpdr = runs.metrics("static", kCleanSnrDb, "adaptive_mpdr").distortion_db;
  const double d_prop = runs.metrics("static", kCleanSnrDb, "proposed").distortion_db;
  const double t = seconds_since(start);
  report(4, nr_high <= nr_low - 5.0 && d_mpdr >= d_prop + 10.0 && t < 60.0,
         fmt("MPDR NR %.1f dB at -20, %.1f dB at 10; distortion at 1000 dB: MPDR %.1f, proposed %.1f; %.1f s", nr_low,
             nr_high, d_mpdr, d_prop, t));
}

void distortion_bound(Runs& runs) {
  double worst = -400.0;
  std::string where;
  for (const auto& [key, m] : runs.all()) {
    if (m.variant != "proposed" && m.variant != "fixed_mvdr") continue;
    if (m.distortion_db > worst) {
      worst = m.distortion_db;
      where = fmt("%s %s at %g dB", m.variant.c_str(), m.scenario.c_str(), m.snr_db);
    }
  }
  report(5, worst <= -15.0, fmt("worst distortion %.1f dB (%s)", worst, where.c_str()));
}

void oracle_dominance(Runs& runs) {
  double margin = 1e9;
  std::size_t points = 0;
  std::vector<std::pair<std::string, double>> seen;
  for (const auto& [key, m] : runs.all())
    if (m.variant == "proposed" && m.eta == 0.9) seen.emplace_back(m.scenario, m.snr_db);
  for (const auto& [name, snr] : seen) {
    if (snr == kCleanSnrDb) continue;  // no noise to reduce
    const double o = runs.metrics(name, snr, "oracle_mvdr").noise_reduction_db;
    const double p = runs.metrics(name, snr, "proposed").noise_reduction_db;
    margin = std::min(margin, o - p);
    ++points;
  }
  report(6, points > 0 && margin >= -0.5, fmt("%zu points, smallest oracle - proposed %.2f dB", points, margin));
}

void eta_sensitivity(Runs& runs) {
  const std::vector<double> grid{0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99};
  const std::vector<double> snrs{-20.0, -10.0, 0.0, 10.0};
  double best = -1e9, best_eta = 0.0;
  std::string detail;
  for (double eta : grid) {
    double mean = 0.0;
    for (double snr : snrs) mean += runs.metrics("static", snr, "proposed", eta).segmental_snr_db;
    mean /= static_cast<double>(snrs.size());
    detail += fmt("%g:%.2f ", eta, mean);
    if (mean > best) {
      best = mean;
      best_eta = eta;
    }
  }
  const VariantRun one = runs.run("static", 0.0, "proposed", 1.0);
  const VariantRun mpdr = runs.run("static", 0.0, "adaptive_mpdr");
  const auto a = one.beamformer.output.data(), b = mpdr.beamformer.output.data();
  const bool identical = std::equal(a.begin(), a.end(), b.begin(), b.end()) && one.components.estimate == mpdr.components.estimate;
  report(7, best_eta >= 0.85 && best_eta <= 0.95 && identical,
         fmt("segmental SNR by eta %s-> peak at %g; eta=1 %s adaptive MPDR", detail.c_str(), best_eta,
             identical ? "matches" : "differs from"));
}

void reduced_array_gap(Runs& runs) {
  const double full = runs.metrics("static", -10.0, "proposed").noise_reduction_db;
  const double ra = runs.metrics("static", -10.0, "proposed_ra").noise_reduction_db;
  report(8, full - ra >= 6.0, fmt("full %.1f dB, two monopoles %.1f dB, gap %.1f dB", full, ra, full - ra));
}

void time_constant() {
  const double tau = alpha_to_tau(0.98, 16000.0, 128.0);
  report(9, std::abs(tau - 0.396) <= 0.001, fmt("tau %.5f s", tau));
}

void near_field_gain() {
  const double r = 0.105, w = 2 * std::numbers::pi * 100.0, c = 343.0;
  const double expected = std::abs(Complex(1.0, 0.0) + c / (Complex(0.0, 1.0) * w * r));
  const Vec3 sensor{0, 0, 0}, source{r, 0, 0};
  const Complex d = subsensor_gain(SubsensorKind::dipole, {1, 0, 0}, source, sensor, w, c);
  const Complex m = subsensor_gain(SubsensorKind::monopole, {}, source, sensor, w, c);
  const double rel = std::abs(std::abs(d / m) / expected - 1.0);
  report(10, rel <= 1e-6, fmt("ratio %.6f, expected %.6f, relative error %.1e", std::abs(d / m), expected, rel));
}

void postfilter_tradeoff(Runs& runs) {
  const auto& none = runs.metrics("static", 0.0, "proposed");
  const auto& p1 = runs.metrics("static", 0.0, "proposed+post1");
  const auto& p2 = runs.metrics("static", 0.0, "proposed+post2");
  const bool pass = p2.noise_reduction_db > p1.noise_reduction_db && p1.noise_reduction_db > none.noise_reduction_db &&
                    p2.distortion_db > p1.distortion_db && p1.distortion_db > none.distortion_db;
  report(11, pass,
         fmt("NR %.2f < %.2f < %.2f, distortion %.2f < %.2f < %.2f", none.noise_reduction_db, p1.noise_reduction_db,
             p2.noise_reduction_db, none.distortion_db, p1.distortion_db, p2.distortion_db));
}

void determinism(const ExperimentParams& params) {
  SweepAxes axes;
  axes.scenarios = {"static", "moving"};
  axes.snr_db = {-10.0, kCleanSnrDb};
  axes.variants = {"proposed", "adaptive_mpdr", "proposed+post2"};
  auto a = run_sweep(params, axes), b = run_sweep(params, axes);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    a[i].runtime_ms = b[i].runtime_ms = 0.0;
    std::ostringstream x, y;
    write_metrics_csv(x, std::span(&a[i], 1));
    write_metrics_csv(y, std::span(&b[i], 1));
    same = x.str() == y.str() && a[i].noise_reduction_db == b[i].noise_reduction_db &&
           a[i].distortion_db == b[i].distortion_db && a[i].segmental_snr_db == b[i].segmental_snr_db;
  }
  report(12, same, fmt("%zu rows, %s", a.size(), same ? "identical" : "different"));
}

}  // namespace

int main() {
  try {
    stft_round_trip();
    mvdr_optimality();

    Runs runs{ExperimentParams{}};
    moving_trend(runs);
    mpdr_degradation(runs);
    // Both distortionless variants on the static points too, so the bound covers every run above.
    for (double snr : {-20.0, -10.0, 0.0, 10.0, kCleanSnrDb})
      for (const char* v : {"proposed", "fixed_mvdr"}) runs.metrics("static", snr, v);
    distortion_bound(runs);
    oracle_dominance(runs);
    eta_sensitivity(runs);
    reduced_array_gap(runs);
    time_constant();
    near_field_gain();
    postfilter_tradeoff(runs);
    determinism(runs.params());
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
