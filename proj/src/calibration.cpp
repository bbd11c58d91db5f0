// SPDX-License-Identifier: Apache-2.0
#include "avs/calibration.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace avs {

ReferenceCombiner ReferenceCombiner::omni_average() {
  ReferenceCombiner r;
  r.c.assign(kArrayChannels, Complex{});
  r.c[0] = 0.5;
  r.c[4] = 0.5;
  return r;
}

ReferenceCombiner ReferenceCombiner::select(std::size_t m, std::size_t channel) {
  if (channel >= m) throw InvalidInput("reference channel out of range");
  ReferenceCombiner r;
  r.c.assign(m, Complex{});
  r.c[channel] = 1.0;
  return r;
}

void ReferenceCombiner::validate() const {
  double n = 0.0;
  for (const Complex& v : c) n += std::norm(v);
  if (!(n > 0.0)) throw InvalidInput("reference combiner must be nonzero");
}

ReferenceCombiner ReferenceCombiner::restricted(std::span<const std::size_t> channels) const {
  ReferenceCombiner r;
  for (std::size_t ch : channels) r.c.push_back(c.at(ch));
  return r;
}

NoiseFloorCovariance estimate_sensor_noise(const Spectrogram& noise_only) {
  const std::size_t frames = noise_only.frames();
  if (frames < 2) throw InvalidInput("rank-deficient calibration");
  const std::size_t bins = noise_only.bins();
  const std::size_t m = noise_only.channels();
  NoiseFloorCovariance cov(bins, m);
  const double inv = 1.0 / static_cast<double>(frames);
  for (std::size_t k = 0; k < bins; ++k) {
    auto out = cov.at(k);
    for (std::size_t l = 0; l < frames; ++l) {
      auto a = noise_only.vector(l, k);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) out[i * m + j] += a[i] * std::conj(a[j]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      out[i * m + i] = {out[i * m + i].real() * inv, 0.0};
      for (std::size_t j = i + 1; j < m; ++j) {
        out[i * m + j] *= inv;
        out[j * m + i] = std::conj(out[i * m + j]);
      }
    }
  }
  return cov;
}

namespace {

Complex dot_conj(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

RtfEstimate estimate_rtf(std::span<const Spectrogram> recordings, const ReferenceCombiner& combiner) {
  if (recordings.empty()) throw InvalidInput("RTF estimation needs at least one recording");
  combiner.validate();
  const StftConfig& config = recordings.front().config();
  const std::size_t m = recordings.front().channels();
  const std::size_t bins = recordings.front().bins();
  if (combiner.c.size() != m) throw InvalidInput("combiner size differs from the channel count");
  for (const auto& rec : recordings) {
    if (!(rec.config() == config) || rec.channels() != m) throw InvalidInput("calibration recordings differ in format");
    if (rec.frames() < 2) throw InvalidInput("rank-deficient calibration");
  }

  BinVectors sum(bins, m);
  std::vector<std::size_t> contributions(bins, 0);
  CVector numerator(m);
  for (const auto& rec : recordings) {
    for (std::size_t k = 0; k < bins; ++k) {
      std::fill(numerator.begin(), numerator.end(), Complex{});
      double denominator = 0.0;
      for (std::size_t l = 0; l < rec.frames(); ++l) {
        auto b = rec.vector(l, k);
        const Complex b_h_c = dot_conj(b, combiner.c);
        for (std::size_t i = 0; i < m; ++i) numerator[i] += b[i] * b_h_c;
        denominator += std::norm(b_h_c);
      }
      if (!(denominator > 0.0)) continue;
      auto acc = sum.at(k);
      for (std::size_t i = 0; i < m; ++i) acc[i] += numerator[i] / denominator;
      ++contributions[k];
    }
  }

  RtfVector rtf(bins, m);
  std::vector<bool> valid(bins, false);
  for (std::size_t k = 0; k < bins; ++k) {
    if (contributions[k] == 0) continue;
    auto h = sum.at(k);
    const Complex c_h_h = dot_conj(combiner.c, h);
    if (std::abs(c_h_h) == 0.0 || !std::isfinite(std::abs(c_h_h))) continue;
    auto out = rtf.at(k);
    for (std::size_t i = 0; i < m; ++i) out[i] = h[i] / c_h_h;
    valid[k] = true;
  }

  RtfEstimate result{std::move(rtf), 0};
  std::vector<std::size_t> valid_bins;
  for (std::size_t k = 0; k < bins; ++k)
    if (valid[k]) valid_bins.push_back(k);
  if (valid_bins.empty()) throw InvalidInput("no calibration bin carries reference energy");
  for (std::size_t k = 0; k < bins; ++k) {
    if (valid[k]) continue;
    ++result.invalid_bins;
    std::size_t best = valid_bins.front();
    for (std::size_t v : valid_bins) {
      const std::size_t dv = v > k ? v - k : k - v;
      const std::size_t db = best > k ? best - k : k - best;
      if (dv < db) best = v;
    }
    auto src = result.rtf.at(best);
    std::copy(src.begin(), src.end(), result.rtf.at(k).begin());
  }
  return result;
}

namespace {

constexpr std::array<char, 8> kMagic{'A', 'V', 'S', 'C', 'A', 'L', 'I', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void u32(std::uint32_t v) { bytes(v, 4); }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void f64(double v) { bytes(std::bit_cast<std::uint64_t>(v), 8); }
  void complex(Complex v) {
    f64(v.real());
    f64(v.imag());
  }

 private:
  void bytes(std::uint64_t v, int count) {
    for (int i = 0; i < count; ++i) os_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(bytes(8)); }
  Complex complex() {
    const double re = f64();
    return {re, f64()};
  }

 private:
  std::uint64_t bytes(int count) {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) {
      const int c = is_.get();
      if (c == std::char_traits<char>::eof()) throw IoError("calibration file is truncated");
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  std::istream& is_;
};

}  // namespace

void save_calibration(const CalibrationArtifact& artifact, const std::filesystem::path& path) {
  const std::size_t m = artifact.rtf.size();
  const std::size_t bins = artifact.rtf.bins();
  if (artifact.noise_floor.size() != m || artifact.noise_floor.bins() != bins || artifact.combiner.c.size() != m)
    throw InvalidInput("calibration artifact parts disagree in size");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  Writer w(os);
  w.u32(kFormatVersion);
  w.f64(artifact.config.sample_rate);
  w.u64(artifact.config.window_length);
  w.u64(artifact.config.hop);
  w.u64(artifact.config.fft_length);
  w.u32(static_cast<std::uint32_t>(artifact.config.window));
  w.u64(m);
  w.u64(bins);
  w.u64(artifact.invalid_bins);
  for (const Complex& v : artifact.combiner.c) w.complex(v);
  for (const Complex& v : artifact.rtf.data()) w.complex(v);
  for (const Complex& v : artifact.noise_floor.data()) w.complex(v);
  if (!os) throw IoError("failed writing " + path.string());
}

CalibrationArtifact load_calibration(const std::filesystem::path& path, const StftConfig& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw IoError(path.string() + " is not a calibration file");
  Reader r(is);
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw IoError("unsupported calibration format version " + std::to_string(version));

  CalibrationArtifact a;
  a.config.sample_rate = r.f64();
  a.config.window_length = r.u64();
  a.config.hop = r.u64();
  a.config.fft_length = r.u64();
  if (r.u32() != static_cast<std::uint32_t>(WindowKind::hamming)) throw IoError("unknown window kind");
  a.config.window = WindowKind::hamming;
  if (!(a.config == expected))
    throw InvalidInput("calibration was made with a different STFT configuration (fs/window/hop/fft " +
                       std::to_string(a.config.sample_rate) + "/" + std::to_string(a.config.window_length) + "/" +
                       std::to_string(a.config.hop) + "/" + std::to_string(a.config.fft_length) + ")");
  const std::size_t m = r.u64();
  const std::size_t bins = r.u64();
  if (m == 0 || m > 64 || bins != expected.num_bins()) throw IoError("calibration file has inconsistent sizes");
  a.invalid_bins = r.u64();
  a.combiner.c.resize(m);
  for (Complex& v : a.combiner.c) v = r.complex();
  a.rtf = RtfVector(bins, m);
  for (Complex& v : a.rtf.data()) v = r.complex();
  a.noise_floor = NoiseFloorCovariance(bins, m);
  for (Complex& v : a.noise_floor.data()) v = r.complex();
  return a;
}

}  // namespace avs
