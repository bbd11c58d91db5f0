// SPDX-License-Identifier: Apache-2.0
// avsenh: simulate, calibrate, enhance and sweep from the command line.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "avs/config.hpp"
#include "avs/wav.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string variant;
  bool quiet = false;
};

avs::RunConfig resolve(const CommonOptions& o) {
  avs::RunConfig c = o.config_path.empty() ? avs::RunConfig{} : avs::load_config(o.config_path);
  if (o.seed) c.experiment.seed = *o.seed;
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  if (!o.variant.empty()) {
    avs::parse_variant(o.variant);
    c.variant = o.variant;
  }
  return c;
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw avs::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void log(const CommonOptions& o, const std::string& line) {
  if (!o.quiet) std::cerr << line << '\n';
}

avs::MultiSignal read_recording(const std::filesystem::path& path, const avs::StftConfig& stft) {
  avs::WavData w = avs::read_wav(path);
  if (w.sample_rate != stft.sample_rate)
    throw avs::InvalidInput("'" + path.string() + "' is sampled at " + std::to_string(w.sample_rate) +
                            " Hz, the configuration expects " + std::to_string(stft.sample_rate) + " Hz");
  if (w.channels.size() != avs::kArrayChannels)
    throw avs::InvalidInput("'" + path.string() + "' has " + std::to_string(w.channels.size()) + " channels, expected " +
                            std::to_string(avs::kArrayChannels));
  return std::move(w.channels);
}

void cmd_simulate(const CommonOptions& o, bool with_calibration) {
  const avs::RunConfig c = resolve(o);
  c.experiment.validate();
  const auto& s = c.experiment.scenario;
  const auto spec = avs::make_scenario(c.experiment, s.name, s.snr_db);
  const auto mix = avs::synthesize_scenario(spec);
  const auto dir = prepare_dir(c.output_dir);
  const double fs = c.experiment.stft.sample_rate;
  avs::write_wav(dir / "mixture.wav", mix.mixture, fs);
  avs::write_wav(dir / "desired.wav", mix.desired_component, fs);
  avs::write_wav(dir / "noise.wav", mix.noise_component, fs);
  const double measured =
      avs::power_ratio_db(avs::omni_average_power(mix.desired_component), avs::omni_average_power(mix.noise_component));
  log(o, "scenario " + s.name + ": " + std::to_string(mix.length()) + " samples, SNR " + std::to_string(measured) +
             " dB at the pressure channels");
  if (with_calibration) {
    const auto rec = avs::make_calibration_recordings(c.experiment);
    for (std::size_t i = 0; i < rec.desired.size(); ++i)
      avs::write_wav(dir / ("calib_desired_" + std::to_string(i) + ".wav"), rec.desired[i], fs);
    avs::write_wav(dir / "calib_noise.wav", rec.noise_only, fs);
    log(o, "wrote " + std::to_string(rec.desired.size()) + " calibration takes and a noise-only recording");
  }
}

void cmd_calibrate(const CommonOptions& o, const std::vector<std::string>& desired, const std::string& noise) {
  const avs::RunConfig c = resolve(o);
  c.experiment.validate();
  const auto& stft = c.experiment.stft;
  avs::CalibrationRecordings rec;
  for (const auto& p : desired) rec.desired.push_back(read_recording(p, stft));
  rec.noise_only = read_recording(noise, stft);
  const auto artifact = avs::calibrate(rec, stft);
  const auto path = prepare_dir(c.output_dir) / "calibration.avscal";
  avs::save_calibration(artifact, path);
  log(o, "wrote " + path.string() + " (" + std::to_string(artifact.invalid_bins) + " bins filled from neighbors)");
}

void write_diagnostics(const std::filesystem::path& path, const avs::EnhancementResult& r,
                       const std::optional<avs::PostfilterResult>& post) {
  std::ofstream out(path);
  if (!out) throw avs::IoError("cannot open '" + path.string() + "' for writing");
  const std::size_t bins = r.output.bins();
  const auto& cfg = r.output.config();
  const auto& d = r.diagnostics;
  out << "frame,time_s,mean_test_statistic,frozen_fraction,mean_weight_norm,regularized_fraction,mean_gain\n";
  for (std::size_t l = 0; l < r.output.frames(); ++l) {
    double t = 0.0, frozen = 0.0, norm = 0.0, hits = 0.0, gain = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const std::size_t i = l * bins + k;
      t += d.test_statistic[i];
      frozen += d.alpha[i] == 1.0 ? 1.0 : 0.0;
      norm += d.weight_norm[i];
      hits += d.regularized[i];
      gain += post ? post->gains[i] : 1.0;
    }
    const double n = static_cast<double>(bins);
    const double time = (static_cast<double>(l * cfg.hop) + 0.5 * static_cast<double>(cfg.window_length)) / cfg.sample_rate;
    out << l << ',' << time << ',' << t / n << ',' << frozen / n << ',' << norm / n << ',' << hits / n << ','
        << gain / n << '\n';
  }
  if (!out) throw avs::IoError("failed writing '" + path.string() + "'");
}

void cmd_enhance(const CommonOptions& o, const std::string& mixture_path, const std::string& calibration_path,
                 const std::string& noise_path) {
  const avs::RunConfig c = resolve(o);
  c.experiment.validate();
  const auto& stft = c.experiment.stft;
  const avs::Variant variant = avs::parse_variant(c.variant);
  const auto calibration = avs::load_calibration(calibration_path, stft);
  const avs::Spectrogram x = avs::analyze(read_recording(mixture_path, stft), stft);
  std::optional<avs::Spectrogram> v;
  if (!noise_path.empty()) v = avs::analyze(read_recording(noise_path, stft), stft);

  avs::BeamformerParams bp = c.experiment.beamformer;
  bp.algorithm = variant.algorithm;
  bp.mask = variant.reduced_array ? avs::ChannelMask::monopoles() : avs::ChannelMask::full();
  bp.combiner = calibration.combiner;
  const auto start = std::chrono::steady_clock::now();
  const auto result = avs::run_pipeline(x, v ? &*v : nullptr, calibration.rtf, calibration.noise_floor, bp);
  std::optional<avs::PostfilterResult> post;
  if (variant.postfilter != avs::PostfilterChoice::none) {
    const auto& pp = variant.postfilter == avs::PostfilterChoice::post1 ? c.experiment.post1 : c.experiment.post2;
    post = avs::apply_postfilter(result.output, result.noise_power, pp);
  }
  const auto signal = avs::synthesize(post ? post->output : result.output);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto dir = prepare_dir(c.output_dir);
  avs::write_wav(dir / "enhanced.wav", {signal}, stft.sample_rate);
  write_diagnostics(dir / "diagnostics.csv", result, post);
  log(o, variant.label() + ": " + std::to_string(result.output.frames()) + " frames in " + std::to_string(elapsed) +
             " s, weight norm bound hit on " +
             std::to_string(100.0 * result.diagnostics.regularization_hit_rate()) + "% of bins");
}

void cmd_sweep(const CommonOptions& o) {
  avs::RunConfig c = resolve(o);
  if (!o.variant.empty()) c.sweep.variants = {o.variant};
  const auto dir = prepare_dir(c.output_dir);
  const auto rows = avs::run_sweep(c.experiment, c.sweep, [&](const avs::MetricsReport& r) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-22s snr %7.1f eta %.2f  NR %7.2f dB  D %8.2f dB  segSNR %6.2f dB",
                  r.scenario.c_str(), r.variant.c_str(), r.snr_db, r.eta, r.noise_reduction_db, r.distortion_db,
                  r.segmental_snr_db);
    log(o, line);
  });
  const auto path = dir / "metrics.csv";
  std::ofstream out(path);
  if (!out) throw avs::IoError("cannot open '" + path.string() + "' for writing");
  avs::write_metrics_csv(out, rows);
  if (!out) throw avs::IoError("failed writing '" + path.string() + "'");
  log(o, "wrote " + std::to_string(rows.size()) + " rows to " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glasses-mounted acoustic vector sensor speech enhancement"};
  app.require_subcommand(1);
  CommonOptions opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "Override the configured seed")->each([&](const std::string&) { opts.seed = seed; });
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_flag("--quiet", opts.quiet, "Suppress progress output");
  };

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic mixture and its ground-truth components");
  add_common(simulate);
  bool with_calibration = false;
  simulate->add_flag("--calibration-recordings", with_calibration,
                     "Also write desired-only calibration takes and a noise-only recording");

  auto* calibrate = app.add_subcommand("calibrate", "Estimate the RTF and sensor-noise covariance");
  add_common(calibrate);
  std::vector<std::string> desired;
  std::string noise_only;
  calibrate->add_option("--desired", desired, "Desired-only recordings, one per take")->required();
  calibrate->add_option("--noise", noise_only, "Sensor-noise-only recording")->required();

  auto* enhance = app.add_subcommand("enhance", "Enhance an 8-channel mixture");
  add_common(enhance);
  std::string mixture, calibration, noise_truth;
  enhance->add_option("--mixture", mixture, "8-channel mixture WAV")->required();
  enhance->add_option("--calibration", calibration, "Calibration file from `calibrate`")->required();
  enhance->add_option("--noise", noise_truth, "True noise component, needed by oracle_mvdr");
  enhance->add_option("--variant", opts.variant, "Beamformer variant label, e.g. proposed+post1");

  auto* sweep = app.add_subcommand("sweep", "Score variants over the configured SNR, eta and scenario grid");
  add_common(sweep);
  sweep->add_option("--variant", opts.variant, "Restrict the sweep to one variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) cmd_simulate(opts, with_calibration);
    if (*calibrate) cmd_calibrate(opts, desired, noise_only);
    if (*enhance) cmd_enhance(opts, mixture, calibration, noise_truth);
    if (*sweep) cmd_sweep(opts);
  } catch (const avs::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const avs::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const avs::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
