// SPDX-License-Identifier: Apache-2.0
#include "avs/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace avs {

namespace {

using nlohmann::json;

/// Rejects keys outside `allowed` so typos never fall back to defaults.
void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw InvalidInput("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("bad value for '" + std::string(key) + "' in " + std::string(where));
  }
}

void parse_stft(const json& j, StftConfig& c) {
  check_keys(j, "stft", {"sample_rate", "window_length", "hop", "fft_length", "window"});
  read(j, "sample_rate", c.sample_rate, "stft");
  read(j, "window_length", c.window_length, "stft");
  read(j, "hop", c.hop, "stft");
  read(j, "fft_length", c.fft_length, "stft");
  std::string window = "hamming";
  read(j, "window", window, "stft");
  if (window != "hamming") throw InvalidInput("unsupported window '" + window + "'");
}

void parse_scenario(const json& j, ScenarioSettings& s) {
  check_keys(j, "scenario",
             {"name", "duration_s", "preamble_s", "snr_db", "sensor_noise_level_db", "interferer_distance_m",
              "calibration_recordings", "room_reflection", "room_order", "reverberant_desired"});
  read(j, "name", s.name, "scenario");
  read(j, "duration_s", s.duration, "scenario");
  read(j, "preamble_s", s.preamble, "scenario");
  read(j, "snr_db", s.snr_db, "scenario");
  read(j, "sensor_noise_level_db", s.sensor_noise_level_db, "scenario");
  read(j, "interferer_distance_m", s.interferer_distance, "scenario");
  read(j, "calibration_recordings", s.calibration_recordings, "scenario");
  read(j, "room_reflection", s.room_reflection, "scenario");
  read(j, "room_order", s.room_order, "scenario");
  read(j, "reverberant_desired", s.reverberant_desired, "scenario");
}

void parse_beamformer(const json& j, RunConfig& c) {
  auto& b = c.experiment.beamformer;
  check_keys(j, "beamformer", {"rho", "eta", "alpha0", "training_s", "variant"});
  read(j, "rho", b.rho, "beamformer");
  read(j, "eta", b.detector.eta, "beamformer");
  read(j, "alpha0", b.detector.alpha0, "beamformer");
  read(j, "training_s", b.training_seconds, "beamformer");
  read(j, "variant", c.variant, "beamformer");
}

PostfilterParams parse_postfilter_set(const json& j, const std::string& where, PostfilterParams defaults) {
  check_keys(j, where, {"beta", "snr_min_db", "w_min_db"});
  double beta = defaults.beta;
  double snr_min_db = 10.0 * std::log10(defaults.snr_min);
  double w_min_db = 20.0 * std::log10(defaults.w_min);
  read(j, "beta", beta, where);
  read(j, "snr_min_db", snr_min_db, where);
  read(j, "w_min_db", w_min_db, where);
  return PostfilterParams::from_db(beta, snr_min_db, w_min_db);
}

void parse_sweep(const json& j, SweepAxes& s) {
  check_keys(j, "sweep", {"scenarios", "snr_db", "eta", "variants"});
  read(j, "scenarios", s.scenarios, "sweep");
  read(j, "snr_db", s.snr_db, "sweep");
  read(j, "eta", s.eta, "sweep");
  read(j, "variants", s.variants, "sweep");
}

json postfilter_json(const PostfilterParams& p) {
  return {{"beta", p.beta}, {"snr_min_db", 10.0 * std::log10(p.snr_min)}, {"w_min_db", 20.0 * std::log10(p.w_min)}};
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"schema_version", "seed", "stft", "scenario", "beamformer", "postfilter", "sweep", "output"});
  if (!j.contains("schema_version")) throw InvalidInput("config lacks schema_version");
  int version = 0;
  read(j, "schema_version", version, "config");
  if (version != kConfigSchemaVersion)
    throw InvalidInput("unsupported schema_version " + std::to_string(version) + ", expected " +
                       std::to_string(kConfigSchemaVersion));

  RunConfig c;
  read(j, "seed", c.experiment.seed, "config");
  if (j.contains("stft")) parse_stft(j["stft"], c.experiment.stft);
  if (j.contains("scenario")) parse_scenario(j["scenario"], c.experiment.scenario);
  if (j.contains("beamformer")) parse_beamformer(j["beamformer"], c);
  if (j.contains("postfilter")) {
    const auto& p = j["postfilter"];
    check_keys(p, "postfilter", {"post1", "post2"});
    if (p.contains("post1")) c.experiment.post1 = parse_postfilter_set(p["post1"], "postfilter.post1", c.experiment.post1);
    if (p.contains("post2")) c.experiment.post2 = parse_postfilter_set(p["post2"], "postfilter.post2", c.experiment.post2);
  }
  if (j.contains("sweep")) parse_sweep(j["sweep"], c.sweep);
  if (j.contains("output")) {
    check_keys(j["output"], "output", {"dir"});
    std::string dir = c.output_dir.string();
    read(j["output"], "dir", dir, "output");
    c.output_dir = dir;
  }

  c.experiment.validate();
  c.sweep.validate();
  parse_variant(c.variant);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const RunConfig& c) {
  const auto& e = c.experiment;
  const json j = {
      {"schema_version", kConfigSchemaVersion},
      {"seed", e.seed},
      {"stft",
       {{"sample_rate", e.stft.sample_rate},
        {"window_length", e.stft.window_length},
        {"hop", e.stft.hop},
        {"fft_length", e.stft.fft_length},
        {"window", "hamming"}}},
      {"scenario",
       {{"name", e.scenario.name},
        {"duration_s", e.scenario.duration},
        {"preamble_s", e.scenario.preamble},
        {"snr_db", e.scenario.snr_db},
        {"sensor_noise_level_db", e.scenario.sensor_noise_level_db},
        {"interferer_distance_m", e.scenario.interferer_distance},
        {"calibration_recordings", e.scenario.calibration_recordings},
        {"room_reflection", e.scenario.room_reflection},
        {"room_order", e.scenario.room_order},
        {"reverberant_desired", e.scenario.reverberant_desired}}},
      {"beamformer",
       {{"rho", e.beamformer.rho},
        {"eta", e.beamformer.detector.eta},
        {"alpha0", e.beamformer.detector.alpha0},
        {"training_s", e.beamformer.training_seconds},
        {"variant", c.variant}}},
      {"postfilter", {{"post1", postfilter_json(e.post1)}, {"post2", postfilter_json(e.post2)}}},
      {"sweep",
       {{"scenarios", c.sweep.scenarios},
        {"snr_db", c.sweep.snr_db},
        {"eta", c.sweep.eta},
        {"variants", c.sweep.variants}}},
      {"output", {{"dir", c.output_dir.string()}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace avs
