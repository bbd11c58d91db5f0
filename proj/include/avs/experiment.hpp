// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "avs/array_model.hpp"
#include "avs/beamformer.hpp"
#include "avs/evaluation.hpp"
#include "avs/postfilter.hpp"

namespace avs {

/// Synthetic recording setup. `name` selects the interferer layout:
/// "static" places three talkers at −45°, 0° and +45° azimuth, "moving" walks
/// one talker along a half circle from −90° to +90° over the whole recording.
struct ScenarioSettings {
  std::string name = "static";
  double duration = 10.0;          // seconds
  double preamble = 1.0;           // noise-only seconds before the desired onset
  double snr_db = 0.0;
  double sensor_noise_level_db = -40.0;
  double interferer_distance = 1.0;  // meters
  std::size_t calibration_recordings = 3;
  /// Wall reflection coefficient of the shoebox room around the listener;
  /// 0 gives free-field propagation.
  double room_reflection = 0.8;
  std::size_t room_order = 2;
  /// Whether the desired talker reverberates too. Calibration takes are then
  /// recorded at different spots in the same room.
  bool reverberant_desired = true;

  void validate() const;
};

bool is_known_scenario(std::string_view name);

/// Everything a run needs besides the sweep axes.
struct ExperimentParams {
  StftConfig stft;
  ScenarioSettings scenario;
  BeamformerParams beamformer;
  PostfilterParams post1 = PostfilterParams::post1();
  PostfilterParams post2 = PostfilterParams::post2();
  std::uint64_t seed = 1;

  void validate() const;
};

/// Independent, reproducible seed for a named purpose.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

ScenarioSpec make_scenario(const ExperimentParams& params, std::string_view name, double snr_db);

struct CalibrationRecordings {
  std::vector<MultiSignal> desired;  // desired talker alone, one per take
  MultiSignal noise_only;            // sensor noise alone
};

CalibrationRecordings make_calibration_recordings(const ExperimentParams& params);

/// Runs both calibration estimators. Throws InvalidInput when the recordings
/// have different channel counts.
CalibrationArtifact calibrate(const CalibrationRecordings& recordings, const StftConfig& stft,
                              const ReferenceCombiner& combiner = ReferenceCombiner::omni_average());

enum class PostfilterChoice { none, post1, post2 };

/// A row label such as "proposed", "fixed_mvdr_ra" or "proposed+post2".
struct Variant {
  Algorithm algorithm = Algorithm::proposed;
  bool reduced_array = false;
  PostfilterChoice postfilter = PostfilterChoice::none;

  std::string label() const;
  friend bool operator==(const Variant&, const Variant&) = default;
};

/// Throws InvalidInput on unknown labels.
Variant parse_variant(std::string_view label);

/// A synthesized recording with the STFTs the pipeline and metrics need.
struct PreparedScenario {
  std::string name;
  double snr_db = 0.0;
  GroundTruthMix truth;
  Spectrogram mixture;
  Spectrogram desired;
  Spectrogram noise;
};

PreparedScenario prepare_scenario(const ScenarioSpec& spec, std::string name, double snr_db);

struct VariantRun {
  EnhancementResult beamformer;
  std::optional<PostfilterResult> postfilter;
  ComponentOutputs components;
  MetricsReport metrics;
};

/// Beamforms, optionally post-filters and scores one variant.
VariantRun run_variant(const PreparedScenario& scenario, const CalibrationArtifact& calibration,
                       const Variant& variant, double eta, const ExperimentParams& params);

struct SweepAxes {
  std::vector<std::string> scenarios{"static", "moving"};
  std::vector<double> snr_db{-20, -15, -10, -5, 0, 5, 10, kCleanSnrDb};
  std::vector<double> eta{0.9};
  std::vector<std::string> variants{"proposed",    "fixed_mvdr",  "fixed_mpdr",     "adaptive_mpdr",
                                    "oracle_mvdr", "unprocessed", "proposed_ra",    "proposed+post1",
                                    "proposed+post2"};

  void validate() const;
};

using SweepProgress = std::function<void(const MetricsReport&)>;

/// One row per scenario × SNR × η × variant, in that nesting order. Variants
/// that ignore η are computed once per scenario and SNR and repeated.
std::vector<MetricsReport> run_sweep(const ExperimentParams& params, const SweepAxes& axes,
                                     const SweepProgress& progress = {});

}  // namespace avs
