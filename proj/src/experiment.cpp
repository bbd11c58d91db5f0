// SPDX-License-Identifier: Apache-2.0
#include "avs/experiment.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include "avs/signals.hpp"

namespace avs {

namespace {

constexpr double kInterfererHeight = 0.075;  // level with the glasses
constexpr double kCalibrationSeconds = 4.0;
constexpr double kNoiseOnlySeconds = 2.0;
constexpr std::size_t kMovingWaypoints = 181;

struct InterfererVoice {
  double azimuth_deg;
  double f0;
  double formant_scale;
};

constexpr InterfererVoice kStaticVoices[] = {
    {-45.0, 95.0, 0.95},
    {0.0, 190.0, 1.15},
    {45.0, 215.0, 1.2},
};

enum SeedStream : std::uint64_t {
  kDesiredTalker = 1,
  kSensorNoise = 2,
  kInterfererTalker = 10,
  kCalibrationTalker = 20,
  kCalibrationNoise = 30,
};

Vec3 on_circle(double distance, double azimuth_deg) {
  const double a = azimuth_deg * std::numbers::pi / 180.0;
  return {distance * std::cos(a), distance * std::sin(a), kInterfererHeight};
}

SourceTrajectory desired_talker(const ExperimentParams& p, double duration, double onset, std::uint64_t seed,
                                const AvsGeometry& geometry) {
  TalkerParams t;
  t.sample_rate = p.stft.sample_rate;
  t.duration = duration;
  t.onset = onset;
  t.seed = seed;
  SourceTrajectory s;
  s.kind = SourceKind::near_field_desired;
  s.positions = {{0.0, geometry.mouth_position}};
  s.signal = synthetic_talker(t);
  return s;
}

RVector interferer_signal(const ExperimentParams& p, const InterfererVoice& voice, std::uint64_t seed) {
  TalkerParams t;
  t.sample_rate = p.stft.sample_rate;
  t.duration = p.scenario.duration;
  t.f0 = voice.f0;
  t.formant_scale = voice.formant_scale;
  t.seed = seed;
  return synthetic_talker(t);
}

ShoeboxRoom scenario_room(const ScenarioSettings& s) {
  ShoeboxRoom room;
  room.reflection = s.room_reflection;
  room.max_order = s.room_order;
  return room;
}

/// The scenario room seen from a different spot for each calibration take:
/// the head moves, so the room shifts the opposite way in head coordinates.
ShoeboxRoom calibration_room(const ScenarioSettings& s, std::size_t take) {
  static constexpr Vec3 kOffsets[] = {{0.4, -0.3, 0.0}, {-0.5, 0.5, 0.1}, {0.1, 0.8, -0.1}, {-0.8, -0.6, 0.0}};
  ShoeboxRoom room = scenario_room(s);
  const Vec3 shift = kOffsets[take % std::size(kOffsets)];
  room.min_corner = room.min_corner + shift;
  room.max_corner = room.max_corner + shift;
  return room;
}

bool uses_eta(Algorithm a) { return a == Algorithm::proposed; }

}  // namespace

void ScenarioSettings::validate() const {
  if (!is_known_scenario(name)) throw InvalidInput("unknown scenario '" + name + "'");
  if (!(duration > 0.0)) throw InvalidInput("scenario duration must be positive");
  if (!(preamble >= 0.0) || preamble >= duration) throw InvalidInput("preamble must lie inside the recording");
  if (!std::isfinite(snr_db)) throw InvalidInput("scenario SNR must be finite");
  if (!std::isfinite(sensor_noise_level_db)) throw InvalidInput("sensor noise level must be finite");
  if (!(interferer_distance > 0.2)) throw InvalidInput("interferer distance must exceed 0.2 m");
  if (calibration_recordings == 0) throw InvalidInput("at least one calibration recording is required");
  if (!(room_reflection >= 0.0 && room_reflection < 1.0)) throw InvalidInput("room reflection must lie in [0, 1)");
  if (room_reflection > 0.0 && room_order == 0) throw InvalidInput("room order must be at least 1");
}

bool is_known_scenario(std::string_view name) { return name == "static" || name == "moving"; }

void ExperimentParams::validate() const {
  stft.validate();
  scenario.validate();
  beamformer.validate();
  post1.validate();
  post2.validate();
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScenarioSpec make_scenario(const ExperimentParams& params, std::string_view name, double snr_db) {
  if (!is_known_scenario(name)) throw InvalidInput("unknown scenario '" + std::string(name) + "'");
  const auto& s = params.scenario;
  ScenarioSpec spec;
  spec.stft = params.stft;
  spec.target_snr_db = snr_db;
  spec.sensor_noise_level_db = s.sensor_noise_level_db;
  spec.seed = derive_seed(params.seed, kSensorNoise);
  spec.desired = desired_talker(params, s.duration, s.preamble, derive_seed(params.seed, kDesiredTalker), spec.geometry);

  if (name == "static") {
    for (std::size_t i = 0; i < std::size(kStaticVoices); ++i) {
      const auto& voice = kStaticVoices[i];
      SourceTrajectory z;
      z.positions = {{0.0, on_circle(s.interferer_distance, voice.azimuth_deg)}};
      z.signal = interferer_signal(params, voice, derive_seed(params.seed, kInterfererTalker + i));
      spec.interferers.push_back(std::move(z));
    }
  } else {
    SourceTrajectory z;
    for (std::size_t i = 0; i < kMovingWaypoints; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(kMovingWaypoints - 1);
      z.positions.push_back({f * s.duration, on_circle(s.interferer_distance, -90.0 + 180.0 * f)});
    }
    z.signal = interferer_signal(params, {0.0, 150.0, 1.1}, derive_seed(params.seed, kInterfererTalker));
    spec.interferers.push_back(std::move(z));
  }
  if (s.room_reflection > 0.0) {
    const ShoeboxRoom room = scenario_room(s);
    for (auto& z : spec.interferers) z.room = room;
    if (s.reverberant_desired) spec.desired.room = room;
  }
  return spec;
}

CalibrationRecordings make_calibration_recordings(const ExperimentParams& params) {
  const auto geometry = AvsGeometry::glasses();
  CalibrationRecordings rec;
  for (std::size_t i = 0; i < params.scenario.calibration_recordings; ++i) {
    SourceTrajectory talker =
        desired_talker(params, kCalibrationSeconds, 0.0, derive_seed(params.seed, kCalibrationTalker + i), geometry);
    if (params.scenario.room_reflection > 0.0 && params.scenario.reverberant_desired)
      talker.room = calibration_room(params.scenario, i);
    rec.desired.push_back(render_source(talker, geometry, params.stft));
  }
  const double reference = omni_average_power(rec.desired.front());
  const auto length = static_cast<std::size_t>(std::llround(kNoiseOnlySeconds * params.stft.sample_rate));
  rec.noise_only = white_noise(geometry.channels(), length,
                               reference * db_to_power(params.scenario.sensor_noise_level_db),
                               derive_seed(params.seed, kCalibrationNoise));
  return rec;
}

CalibrationArtifact calibrate(const CalibrationRecordings& recordings, const StftConfig& stft,
                              const ReferenceCombiner& combiner) {
  if (recordings.desired.empty()) throw InvalidInput("no desired-only calibration recordings");
  const std::size_t channels = recordings.noise_only.size();
  std::vector<Spectrogram> spectra;
  for (const auto& r : recordings.desired) {
    if (r.size() != channels) throw InvalidInput("calibration recordings differ in channel count");
    spectra.push_back(analyze(r, stft));
  }
  RtfEstimate rtf = estimate_rtf(spectra, combiner);
  CalibrationArtifact artifact;
  artifact.config = stft;
  artifact.combiner = combiner;
  artifact.rtf = std::move(rtf.rtf);
  artifact.invalid_bins = rtf.invalid_bins;
  artifact.noise_floor = estimate_sensor_noise(analyze(recordings.noise_only, stft));
  return artifact;
}

std::string Variant::label() const {
  std::string s(to_string(algorithm));
  if (reduced_array) s += "_ra";
  if (postfilter == PostfilterChoice::post1) s += "+post1";
  if (postfilter == PostfilterChoice::post2) s += "+post2";
  return s;
}

Variant parse_variant(std::string_view label) {
  Variant v;
  std::string_view rest = label;
  if (const auto plus = rest.find('+'); plus != std::string_view::npos) {
    const auto post = rest.substr(plus + 1);
    if (post == "post1")
      v.postfilter = PostfilterChoice::post1;
    else if (post == "post2")
      v.postfilter = PostfilterChoice::post2;
    else
      throw InvalidInput("unknown post-filter '" + std::string(post) + "' in variant '" + std::string(label) + "'");
    rest = rest.substr(0, plus);
  }
  if (rest.ends_with("_ra")) {
    v.reduced_array = true;
    rest.remove_suffix(3);
  }
  v.algorithm = parse_algorithm(rest);
  return v;
}

PreparedScenario prepare_scenario(const ScenarioSpec& spec, std::string name, double snr_db) {
  PreparedScenario p;
  p.name = std::move(name);
  p.snr_db = snr_db;
  p.truth = synthesize_scenario(spec);
  p.mixture = analyze(p.truth.mixture, spec.stft);
  p.desired = analyze(p.truth.desired_component, spec.stft);
  p.noise = analyze(p.truth.noise_component, spec.stft);
  return p;
}

VariantRun run_variant(const PreparedScenario& scenario, const CalibrationArtifact& calibration,
                       const Variant& variant, double eta, const ExperimentParams& params) {
  if (!(calibration.config == scenario.mixture.config()))
    throw InvalidInput("calibration STFT configuration does not match the recording");
  BeamformerParams bp = params.beamformer;
  bp.algorithm = variant.algorithm;
  bp.detector.eta = eta;
  bp.mask = variant.reduced_array ? ChannelMask::monopoles() : ChannelMask::full(scenario.mixture.channels());
  bp.combiner = calibration.combiner;

  const auto start = std::chrono::steady_clock::now();
  VariantRun run;
  run.beamformer = run_pipeline(scenario.mixture, &scenario.noise, calibration.rtf, calibration.noise_floor, bp);
  std::span<const double> gains;
  if (variant.postfilter != PostfilterChoice::none) {
    const auto& pp = variant.postfilter == PostfilterChoice::post1 ? params.post1 : params.post2;
    run.postfilter = apply_postfilter(run.beamformer.output, run.beamformer.noise_power, pp);
    gains = run.postfilter->gains;
  }
  run.components = component_outputs(run.beamformer, &scenario.desired, &scenario.noise, gains);
  const auto stop = std::chrono::steady_clock::now();

  const std::size_t length = run.components.estimate.size();
  const auto [left, right] = AvsGeometry::monopole_channels();
  const auto head = [length](const RVector& v) { return std::span<const double>(v.data(), length); };
  const auto& d = scenario.truth.desired_component;
  const auto& n = scenario.truth.noise_component;

  RVector clean(length);
  for (std::size_t i = 0; i < length; ++i) clean[i] = 0.5 * (d[left][i] + d[right][i]);

  MetricsReport& m = run.metrics;
  m.scenario = scenario.name;
  m.variant = variant.label();
  m.snr_db = scenario.snr_db;
  m.eta = eta;
  const bool reference_signal = variant.algorithm == Algorithm::unprocessed && variant.postfilter == PostfilterChoice::none;
  m.noise_reduction_db =
      reference_signal ? 0.0 : noise_reduction_db(head(n[left]), head(n[right]), run.components.noise);
  m.distortion_db = distortion_db(head(d[left]), head(d[right]), run.components.desired);
  m.segmental_snr_db = segmental_snr_db(clean, run.components.estimate, scenario.mixture.config().sample_rate);
  m.regularization_hit_rate = run.beamformer.diagnostics.regularization_hit_rate();
  m.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return run;
}

void SweepAxes::validate() const {
  if (scenarios.empty() || snr_db.empty() || eta.empty() || variants.empty())
    throw InvalidInput("sweep axes must not be empty");
  for (const auto& s : scenarios)
    if (!is_known_scenario(s)) throw InvalidInput("unknown scenario '" + s + "'");
  for (double e : eta) DetectorParams{e, 0.5}.validate();
  for (double s : snr_db)
    if (!std::isfinite(s)) throw InvalidInput("sweep SNR must be finite");
  for (const auto& v : variants) parse_variant(v);
}

std::vector<MetricsReport> run_sweep(const ExperimentParams& params, const SweepAxes& axes,
                                     const SweepProgress& progress) {
  params.validate();
  axes.validate();
  std::vector<Variant> variants;
  for (const auto& v : axes.variants) variants.push_back(parse_variant(v));
  const CalibrationArtifact calibration = calibrate(make_calibration_recordings(params), params.stft);

  std::vector<MetricsReport> rows;
  for (const auto& name : axes.scenarios) {
    for (double snr : axes.snr_db) {
      const PreparedScenario scenario = prepare_scenario(make_scenario(params, name, snr), name, snr);
      std::map<std::string, MetricsReport> eta_free;
      for (double eta : axes.eta) {
        for (const auto& v : variants) {
          MetricsReport row;
          if (uses_eta(v.algorithm)) {
            row = run_variant(scenario, calibration, v, eta, params).metrics;
          } else {
            auto it = eta_free.find(v.label());
            if (it == eta_free.end())
              it = eta_free.emplace(v.label(), run_variant(scenario, calibration, v, eta, params).metrics).first;
            row = it->second;
            row.eta = eta;
          }
          if (progress) progress(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace avs
