// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace avs {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using RVector = std::vector<double>;

/// Channel-major multichannel time series: signal[channel][sample].
using MultiSignal = std::vector<std::vector<double>>;

/// Number of channels of the two-AVS array (4 subsensors per AVS).
inline constexpr std::size_t kArrayChannels = 8;

/// SNR operating point treated as "desired source only".
inline constexpr double kCleanSnrDb = 1000.0;

/// Cap used for degenerate dB ratios.
inline constexpr double kDbCap = 200.0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or violated input precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const { return (1.0 / norm()) * *this; }
};

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// 10·log10(ratio), clamped to ±kDbCap so degenerate ratios stay finite.
inline double power_ratio_db(double numerator, double denominator) {
  if (denominator <= 0.0) return numerator > 0.0 ? kDbCap : 0.0;
  if (numerator <= 0.0) return -kDbCap;
  const double db = 10.0 * std::log10(numerator / denominator);
  if (db > kDbCap) return kDbCap;
  if (db < -kDbCap) return -kDbCap;
  return db;
}

}  // namespace avs
