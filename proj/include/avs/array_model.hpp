// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "avs/stft.hpp"

namespace avs {

enum class SubsensorKind { monopole, dipole };

struct Subsensor {
  SubsensorKind kind = SubsensorKind::monopole;
  Vec3 orientation;  // unused for monopoles
};

/// Two acoustic vector sensors on the temples of a glasses frame. Head
/// coordinates: x forward, y left, z up, in meters. Channel 4a is the pressure
/// (monopole) subsensor of AVS a and channels 4a+1..4a+3 are its three dipoles.
struct AvsGeometry {
  std::array<Vec3, 2> sensor_positions{};
  std::array<std::array<Vec3, 3>, 2> dipole_orientations{};
  Vec3 mouth_position;
  double speed_of_sound = 343.0;

  /// AVS centers ±lateral_offset to the sides of the mouth axis, 7.5 cm above
  /// the mouth, at `mouth_distance` from the mouth; dipoles on the head axes.
  static AvsGeometry glasses(double mouth_distance = 0.105, double lateral_offset = 0.07);

  void validate() const;

  std::size_t channels() const { return kArrayChannels; }
  Subsensor subsensor(std::size_t channel) const;
  Vec3 channel_position(std::size_t channel) const { return sensor_positions.at(channel / 4); }
  /// Pressure channels, left AVS first.
  static constexpr std::array<std::size_t, 2> monopole_channels() { return {0, 4}; }
};

/// Free-field response of one subsensor to a point source at angular
/// frequency omega: (1/r)e^{-jωr/c} for a monopole and
/// (1/r)(1 + c/(jωr))(qᵀu)e^{-jωr/c} for a dipole with orientation q, u being
/// the unit vector from the sensor toward the source.
Complex subsensor_gain(SubsensorKind kind, const Vec3& orientation, const Vec3& source, const Vec3& sensor,
                       double angular_frequency, double speed_of_sound);

/// Direct-path response of all channels to a source at `source`.
CVector transfer_vector(const AvsGeometry& geometry, const Vec3& source, double angular_frequency);

enum class SourceKind { near_field_desired, far_field_interferer };

struct Waypoint {
  double time = 0.0;  // seconds
  Vec3 position;
};

/// A discrete reflection modeled as an image source.
struct Echo {
  double delay = 0.0;  // extra seconds on top of the image-path propagation
  double gain = 0.0;
  Vec3 image_position;
};

/// Rectangular room with rigid-geometry image sources. Corners are in head
/// coordinates; one broadband reflection coefficient for all walls.
struct ShoeboxRoom {
  Vec3 min_corner{-2.5, -2.0, -1.2};
  Vec3 max_corner{2.5, 2.2, 1.8};
  double reflection = 0.7;
  std::size_t max_order = 2;

  bool contains(const Vec3& p) const;
  void validate() const;
};

/// Image sources of `source` up to the room's reflection order, direct path
/// excluded. Each echo carries gain reflection^order and no extra delay.
std::vector<Echo> image_sources(const ShoeboxRoom& room, const Vec3& source);

struct SourceTrajectory {
  std::vector<Waypoint> positions;
  RVector signal;
  SourceKind kind = SourceKind::far_field_interferer;
  /// Fixed reflections, in addition to any room reflections.
  std::vector<Echo> echoes;
  /// Room whose image sources follow the source along its trajectory.
  std::optional<ShoeboxRoom> room;

  /// Piecewise-linear position; held constant outside the waypoint span.
  Vec3 position_at(double time) const;
  void validate(const AvsGeometry& geometry) const;
};

struct ScenarioSpec {
  AvsGeometry geometry = AvsGeometry::glasses();
  StftConfig stft;
  SourceTrajectory desired;
  std::vector<SourceTrajectory> interferers;
  double target_snr_db = 0.0;
  /// White sensor noise power per channel relative to the desired power.
  double sensor_noise_level_db = -40.0;
  std::uint64_t seed = 1;
};

struct GroundTruthMix {
  MultiSignal mixture;
  MultiSignal desired_component;
  MultiSignal noise_component;

  std::size_t length() const { return mixture.empty() ? 0 : mixture.front().size(); }
};

/// Mean power averaged over the two pressure channels.
double omni_average_power(const MultiSignal& signal);

/// Propagates one source to all eight channels. Runs in the STFT domain:
/// per frame, the source position is sampled at the frame center and every
/// bin is scaled by the subsensor response. The DC bin is zeroed.
MultiSignal render_source(const SourceTrajectory& source, const AvsGeometry& geometry, const StftConfig& stft);

/// Renders every source, balances the interferers to equal power, adds sensor
/// noise and scales the noise so the SNR at the pressure channels hits the
/// target. Deterministic given the spec.
GroundTruthMix synthesize_scenario(const ScenarioSpec& spec);

/// Adds independent white Gaussian noise to each channel, at `level_db`
/// relative to the desired-component power, to both the mixture and the
/// noise component.
GroundTruthMix add_sensor_noise(GroundTruthMix mix, double level_db, std::uint64_t seed);

/// White Gaussian noise whose realized per-channel mean power is exactly `power`.
MultiSignal white_noise(std::size_t channels, std::size_t length, double power, std::uint64_t seed);

}  // namespace avs
