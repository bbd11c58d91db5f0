// SPDX-License-Identifier: Apache-2.0
#include "avs/array_model.hpp"

#include <algorithm>
#include <numbers>
#include <random>

namespace avs {

namespace {
constexpr double kAvsHeightAboveMouth = 0.075;
constexpr double kOrthonormalTolerance = 1e-9;
constexpr double kNoSensorNoiseDb = -1000.0;
}  // namespace

AvsGeometry AvsGeometry::glasses(double mouth_distance, double lateral_offset) {
  const double forward_sq =
      mouth_distance * mouth_distance - lateral_offset * lateral_offset - kAvsHeightAboveMouth * kAvsHeightAboveMouth;
  if (forward_sq < 0.0) throw InvalidInput("mouth distance too short for the lateral offset");
  const double forward = std::sqrt(forward_sq);
  AvsGeometry g;
  g.sensor_positions = {Vec3{forward, lateral_offset, kAvsHeightAboveMouth},
                        Vec3{forward, -lateral_offset, kAvsHeightAboveMouth}};
  const std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  g.dipole_orientations = {axes, axes};
  g.mouth_position = Vec3{0, 0, 0};
  return g;
}

void AvsGeometry::validate() const {
  if (!(speed_of_sound > 0.0)) throw InvalidInput("speed of sound must be positive");
  for (const auto& triplet : dipole_orientations)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        if (std::abs(triplet[i].dot(triplet[j]) - expected) > kOrthonormalTolerance)
          throw InvalidInput("dipole orientations are not orthonormal");
      }
  for (const auto& p : sensor_positions)
    if (!((p - mouth_position).norm() > 0.0)) throw InvalidInput("mouth collocated with a sensor");
}

Subsensor AvsGeometry::subsensor(std::size_t channel) const {
  if (channel >= kArrayChannels) throw InvalidInput("channel index out of range");
  const std::size_t sub = channel % 4;
  if (sub == 0) return {SubsensorKind::monopole, {}};
  return {SubsensorKind::dipole, dipole_orientations[channel / 4][sub - 1]};
}

Complex subsensor_gain(SubsensorKind kind, const Vec3& orientation, const Vec3& source, const Vec3& sensor,
                       double angular_frequency, double speed_of_sound) {
  const Vec3 offset = source - sensor;
  const double r = offset.norm();
  if (!(r > 0.0)) throw InvalidInput("source collocated with sensor");
  const Complex propagation = std::polar(1.0 / r, -angular_frequency * r / speed_of_sound);
  if (kind == SubsensorKind::monopole) return propagation;
  if (angular_frequency == 0.0) throw InvalidInput("dipole undefined at DC");
  const double cosine = orientation.dot((1.0 / r) * offset);
  const Complex near_field = 1.0 + speed_of_sound / (Complex(0.0, angular_frequency) * r);
  return propagation * near_field * cosine;
}

CVector transfer_vector(const AvsGeometry& geometry, const Vec3& source, double angular_frequency) {
  CVector h(geometry.channels());
  for (std::size_t m = 0; m < h.size(); ++m) {
    const Subsensor s = geometry.subsensor(m);
    h[m] = subsensor_gain(s.kind, s.orientation, source, geometry.channel_position(m), angular_frequency,
                          geometry.speed_of_sound);
  }
  return h;
}

Vec3 SourceTrajectory::position_at(double time) const {
  if (positions.empty()) throw InvalidInput("trajectory has no positions");
  if (time <= positions.front().time) return positions.front().position;
  if (time >= positions.back().time) return positions.back().position;
  const auto next = std::upper_bound(positions.begin(), positions.end(), time,
                                     [](double t, const Waypoint& w) { return t < w.time; });
  const auto prev = next - 1;
  const double frac = (time - prev->time) / (next->time - prev->time);
  return prev->position + frac * (next->position - prev->position);
}

bool ShoeboxRoom::contains(const Vec3& p) const {
  return p.x > min_corner.x && p.x < max_corner.x && p.y > min_corner.y && p.y < max_corner.y &&
         p.z > min_corner.z && p.z < max_corner.z;
}

void ShoeboxRoom::validate() const {
  if (!(max_corner.x > min_corner.x && max_corner.y > min_corner.y && max_corner.z > min_corner.z))
    throw InvalidInput("room corners are not ordered");
  if (!(reflection >= 0.0 && reflection < 1.0)) throw InvalidInput("room reflection must lie in [0, 1)");
}

std::vector<Echo> image_sources(const ShoeboxRoom& room, const Vec3& source) {
  const auto order = static_cast<long>(room.max_order);
  // Per axis: image coordinate and reflection count for every candidate image.
  auto axis = [order](double lo, double hi, double u) {
    std::vector<std::pair<double, long>> out;
    const double length = hi - lo;
    for (long n = -order; n <= order; ++n) {
      out.push_back({lo + 2.0 * static_cast<double>(n) * length + (u - lo), 2 * std::abs(n)});
      out.push_back({lo + 2.0 * static_cast<double>(n) * length - (u - lo), std::abs(2 * n - 1)});
    }
    return out;
  };
  const auto xs = axis(room.min_corner.x, room.max_corner.x, source.x);
  const auto ys = axis(room.min_corner.y, room.max_corner.y, source.y);
  const auto zs = axis(room.min_corner.z, room.max_corner.z, source.z);
  std::vector<Echo> echoes;
  for (const auto& [x, ox] : xs)
    for (const auto& [y, oy] : ys)
      for (const auto& [z, oz] : zs) {
        const long total = ox + oy + oz;
        if (total == 0 || total > order) continue;
        echoes.push_back({0.0, std::pow(room.reflection, static_cast<double>(total)), {x, y, z}});
      }
  return echoes;
}

void SourceTrajectory::validate(const AvsGeometry& geometry) const {
  if (positions.empty()) throw InvalidInput("trajectory has no positions");
  if (room) {
    room->validate();
    for (const auto& w : positions)
      if (!room->contains(w.position)) throw InvalidInput("source lies outside the room");
    for (const auto& s : geometry.sensor_positions)
      if (!room->contains(s)) throw InvalidInput("array lies outside the room");
  }
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i].time > positions[i - 1].time)) throw InvalidInput("trajectory times must increase");
  for (const auto& w : positions)
    for (const auto& s : geometry.sensor_positions)
      if (!((w.position - s).norm() > 0.0)) throw InvalidInput("source collocated with sensor");
  for (const auto& e : echoes)
    for (const auto& s : geometry.sensor_positions)
      if (!((e.image_position - s).norm() > 0.0)) throw InvalidInput("echo image collocated with sensor");
  for (double v : signal)
    if (!std::isfinite(v)) throw InvalidInput("source signal is not finite");
}

double omni_average_power(const MultiSignal& signal) {
  double total = 0.0;
  for (std::size_t ch : AvsGeometry::monopole_channels()) {
    if (ch >= signal.size()) throw InvalidInput("signal lacks the pressure channels");
    const auto& x = signal[ch];
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    total += acc / static_cast<double>(x.size());
  }
  return 0.5 * total;
}

namespace {

// Per-bin responses of all channels, DC zeroed: gains[k * M + m].
CVector bin_responses(const SourceTrajectory& source, const AvsGeometry& geometry, const StftConfig& stft,
                      const Vec3& position) {
  const std::size_t bins = stft.num_bins();
  const std::size_t channels = geometry.channels();
  CVector gains(bins * channels, Complex{});
  std::vector<Echo> echoes = source.echoes;
  if (source.room) {
    const auto images = image_sources(*source.room, position);
    echoes.insert(echoes.end(), images.begin(), images.end());
  }
  for (std::size_t k = 1; k < bins; ++k) {
    const double omega = 2.0 * std::numbers::pi * stft.bin_frequency(k);
    CVector h = transfer_vector(geometry, position, omega);
    for (const Echo& e : echoes) {
      const CVector reflected = transfer_vector(geometry, e.image_position, omega);
      const Complex extra = e.gain * std::polar(1.0, -omega * e.delay);
      for (std::size_t m = 0; m < channels; ++m) h[m] += extra * reflected[m];
    }
    std::copy(h.begin(), h.end(), gains.begin() + static_cast<std::ptrdiff_t>(k * channels));
  }
  return gains;
}

}  // namespace

MultiSignal render_source(const SourceTrajectory& source, const AvsGeometry& geometry, const StftConfig& stft) {
  geometry.validate();
  source.validate(geometry);
  const Spectrogram spectrum = analyze(source.signal, stft);
  const std::size_t frames = spectrum.frames();
  const std::size_t bins = spectrum.bins();
  const std::size_t channels = geometry.channels();

  const bool is_static = source.positions.size() == 1;
  CVector gains;
  if (is_static) gains = bin_responses(source, geometry, stft, source.positions.front().position);

  std::vector<Spectrogram> per_channel(channels, Spectrogram(stft, frames, 1));
  for (std::size_t l = 0; l < frames; ++l) {
    if (!is_static) {
      const double center = (static_cast<double>(l * stft.hop) + 0.5 * static_cast<double>(stft.window_length)) /
                            stft.sample_rate;
      gains = bin_responses(source, geometry, stft, source.position_at(center));
    }
    for (std::size_t k = 0; k < bins; ++k) {
      const Complex s = spectrum.at(l, k, 0);
      for (std::size_t m = 0; m < channels; ++m) per_channel[m].at(l, k, 0) = gains[k * channels + m] * s;
    }
  }
  MultiSignal out(channels);
  for (std::size_t m = 0; m < channels; ++m) out[m] = synthesize(per_channel[m]);
  // Frame-wise filtering smears an onset back by up to one frame; nothing can arrive before the source starts.
  const auto first = std::find_if(source.signal.begin(), source.signal.end(), [](double v) { return v != 0.0; });
  const auto silent = static_cast<std::size_t>(first - source.signal.begin());
  for (auto& ch : out) std::fill(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(std::min(silent, ch.size())), 0.0);
  return out;
}

MultiSignal white_noise(std::size_t channels, std::size_t length, double power, std::uint64_t seed) {
  MultiSignal out(channels, RVector(length, 0.0));
  if (length == 0) return out;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& ch : out) {
    double acc = 0.0;
    for (double& v : ch) {
      v = normal(engine);
      acc += v * v;
    }
    const double scale = std::sqrt(power * static_cast<double>(length) / acc);
    for (double& v : ch) v *= scale;
  }
  return out;
}

GroundTruthMix add_sensor_noise(GroundTruthMix mix, double level_db, std::uint64_t seed) {
  if (!std::isfinite(level_db)) throw InvalidInput("sensor noise level must be finite");
  const double reference = omni_average_power(mix.desired_component);
  const MultiSignal noise = white_noise(mix.mixture.size(), mix.length(), reference * db_to_power(level_db), seed);
  for (std::size_t m = 0; m < noise.size(); ++m)
    for (std::size_t n = 0; n < noise[m].size(); ++n) {
      mix.mixture[m][n] += noise[m][n];
      mix.noise_component[m][n] += noise[m][n];
    }
  return mix;
}

namespace {

double omni_cross_power(const MultiSignal& a, const MultiSignal& b) {
  double total = 0.0;
  for (std::size_t ch : AvsGeometry::monopole_channels()) {
    double acc = 0.0;
    for (std::size_t n = 0; n < a[ch].size(); ++n) acc += a[ch][n] * b[ch][n];
    total += acc / static_cast<double>(a[ch].size());
  }
  return 0.5 * total;
}

void scale_in_place(MultiSignal& x, double s) {
  for (auto& ch : x)
    for (double& v : ch) v *= s;
}

}  // namespace

GroundTruthMix synthesize_scenario(const ScenarioSpec& spec) {
  spec.stft.validate();
  spec.geometry.validate();
  if (spec.desired.kind != SourceKind::near_field_desired) throw InvalidInput("desired source must be near-field");
  if (!std::isfinite(spec.target_snr_db)) throw InvalidInput("target SNR must be finite");
  for (const auto& z : spec.interferers)
    if (z.signal.size() != spec.desired.signal.size()) throw InvalidInput("source signals differ in length");

  GroundTruthMix mix;
  mix.desired_component = render_source(spec.desired, spec.geometry, spec.stft);
  const std::size_t channels = mix.desired_component.size();
  const std::size_t length = mix.desired_component.front().size();
  const double desired_power = omni_average_power(mix.desired_component);
  if (!(desired_power > 0.0)) throw InvalidInput("desired source is silent");

  // Interferers at equal mean power, referenced to the desired power.
  MultiSignal interference(channels, RVector(length, 0.0));
  for (const auto& z : spec.interferers) {
    MultiSignal rendered = render_source(z, spec.geometry, spec.stft);
    const double p = omni_average_power(rendered);
    if (!(p > 0.0)) throw InvalidInput("interferer is silent at the pressure channels");
    const double s = std::sqrt(desired_power / p);
    for (std::size_t m = 0; m < channels; ++m)
      for (std::size_t n = 0; n < length; ++n) interference[m][n] += s * rendered[m][n];
  }

  const bool no_sensor_noise = spec.sensor_noise_level_db <= kNoSensorNoiseDb;
  const bool no_noise = spec.interferers.empty() && no_sensor_noise;
  if (no_noise && spec.target_snr_db < kCleanSnrDb) throw InvalidInput("no noise to scale");

  GroundTruthMix base{mix.desired_component, mix.desired_component, interference};
  base = add_sensor_noise(std::move(base), spec.sensor_noise_level_db, spec.seed);
  MultiSignal sensor(channels, RVector(length));
  for (std::size_t m = 0; m < channels; ++m)
    for (std::size_t n = 0; n < length; ++n) sensor[m][n] = base.noise_component[m][n] - interference[m][n];

  if (!no_noise) {
    const double target = desired_power * db_to_power(-spec.target_snr_db);
    const double p_sensor = omni_average_power(sensor);
    const double p_interf = omni_average_power(interference);
    if (!spec.interferers.empty() && p_sensor < target) {
      // Scale only the interferers: a² P_i + 2a C + P_e = P_target.
      const double cross = omni_cross_power(interference, sensor);
      const double disc = cross * cross - p_interf * (p_sensor - target);
      const double a = (-cross + std::sqrt(disc)) / p_interf;
      scale_in_place(interference, a);
      for (std::size_t m = 0; m < channels; ++m)
        for (std::size_t n = 0; n < length; ++n) base.noise_component[m][n] = interference[m][n] + sensor[m][n];
    } else {
      // Sensor noise alone exceeds the target: scale all noise together.
      const double total = omni_average_power(base.noise_component);
      scale_in_place(base.noise_component, std::sqrt(target / total));
    }
  }

  mix.noise_component = std::move(base.noise_component);
  mix.mixture.assign(channels, RVector(length));
  for (std::size_t m = 0; m < channels; ++m)
    for (std::size_t n = 0; n < length; ++n)
      mix.mixture[m][n] = mix.desired_component[m][n] + mix.noise_component[m][n];
  return mix;
}

}  // namespace avs
