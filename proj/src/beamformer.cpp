// SPDX-License-Identifier: Apache-2.0
#include "avs/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <set>

#include "avs/hermitian.hpp"
#include "avs/kernels.hpp"

namespace avs {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kAlgorithmNames{{
    {Algorithm::proposed, "proposed"},
    {Algorithm::fixed_mvdr, "fixed_mvdr"},
    {Algorithm::fixed_mpdr, "fixed_mpdr"},
    {Algorithm::adaptive_mpdr, "adaptive_mpdr"},
    {Algorithm::oracle_mvdr, "oracle_mvdr"},
    {Algorithm::unprocessed, "unprocessed"},
}};

constexpr double kMaxCondition = 1e12;
constexpr double kLoadingFactor = 1e-10;

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  for (const auto& [a, name] : kAlgorithmNames)
    if (a == algorithm) return name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kAlgorithmNames)
    if (n == name) return a;
  throw InvalidInput("unknown beamformer variant '" + std::string(name) + "'");
}

ChannelMask ChannelMask::full(std::size_t channels) {
  std::vector<std::size_t> all(channels);
  for (std::size_t i = 0; i < channels; ++i) all[i] = i;
  return ChannelMask(std::move(all));
}

ChannelMask ChannelMask::monopoles() {
  const auto omni = std::array<std::size_t, 2>{0, 4};
  return ChannelMask({omni.begin(), omni.end()});
}

ChannelMask::ChannelMask(std::vector<std::size_t> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) throw InvalidInput("channel mask is empty");
  if (std::set<std::size_t>(channels_.begin(), channels_.end()).size() != channels_.size())
    throw InvalidInput("channel mask repeats a channel");
}

bool ChannelMask::is_identity(std::size_t total) const {
  if (channels_.size() != total) return false;
  for (std::size_t i = 0; i < total; ++i)
    if (channels_[i] != i) return false;
  return true;
}

void BeamformerParams::validate() const {
  if (!(rho > 0.0)) throw InvalidInput("norm bound rho must be positive");
  detector.validate();
  if (!(training_seconds > 0.0)) throw InvalidInput("training segment must be positive");
  combiner.validate();
}

double PipelineDiagnostics::regularization_hit_rate() const {
  if (regularized.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto r : regularized) hits += r;
  return static_cast<double>(hits) / static_cast<double>(regularized.size());
}

void update_covariance(std::span<Complex> cov, std::span<const Complex> x, double alpha) {
  if (cov.size() != x.size() * x.size()) throw InvalidInput("covariance and vector sizes differ");
  kernels::active().rank1_update(cov.data(), x.data(), &alpha, 1, x.size());
}

namespace {

/// Writes MVDR weights into w. `scratch` holds m*m values. Returns whether
/// diagonal loading was needed.
bool solve_mvdr(std::span<const Complex> cov, std::span<const Complex> h, std::span<Complex> w,
                std::span<Complex> scratch) {
  const std::size_t m = h.size();
  std::copy(cov.begin(), cov.end(), scratch.begin());
  CholeskyStatus status = cholesky_factor(scratch, m);
  bool loaded = false;
  if (!status.ok || status.condition_estimate > kMaxCondition) {
    loaded = true;
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += cov[i * m + i].real();
    const double load = kLoadingFactor * trace / static_cast<double>(m);
    std::copy(cov.begin(), cov.end(), scratch.begin());
    for (std::size_t i = 0; i < m; ++i) scratch[i * m + i] += load;
    status = cholesky_factor(scratch, m);
    if (!status.ok) throw NumericalError("singular covariance");
  }
  std::copy(h.begin(), h.end(), w.begin());
  cholesky_solve(scratch, m, w);
  Complex denom{};
  for (std::size_t i = 0; i < m; ++i) denom += std::conj(h[i]) * w[i];
  if (!(std::abs(denom) > 0.0) || !std::isfinite(std::abs(denom))) throw NumericalError("singular covariance");
  for (auto& v : w) v /= denom;
  return loaded;
}

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

Complex inner(std::span<const Complex> w, std::span<const Complex> x) {
  Complex s{};
  for (std::size_t i = 0; i < w.size(); ++i) s += std::conj(w[i]) * x[i];
  return s;
}

/// (1/L)·Σ x xᴴ over frames [first, last).
BinMatrices sample_covariance(const Spectrogram& x, std::size_t first, std::size_t last) {
  const std::size_t m = x.channels();
  BinMatrices cov(x.bins(), m);
  const double inv = 1.0 / static_cast<double>(last - first);
  for (std::size_t k = 0; k < x.bins(); ++k) {
    auto out = cov.at(k);
    for (std::size_t l = first; l < last; ++l) {
      auto v = x.vector(l, k);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) out[i * m + j] += v[i] * std::conj(v[j]);
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

}  // namespace

CVector mvdr_weights(std::span<const Complex> cov, std::span<const Complex> h) {
  const std::size_t m = h.size();
  if (cov.size() != m * m) throw InvalidInput("covariance and steering sizes differ");
  if (!(norm2(h) > 0.0)) throw InvalidInput("invalid steering vector");
  CVector w(m), scratch(m * m);
  solve_mvdr(cov, h, w, scratch);
  return w;
}

bool regularize(std::span<Complex> w, double rho) {
  if (!(rho > 0.0)) throw InvalidInput("norm bound rho must be positive");
  const double n = norm2(w);
  if (n <= rho) return false;
  const double s = rho / n;
  for (auto& v : w) v *= s;
  return true;
}

EnhancementResult run_pipeline(const Spectrogram& mixture, const Spectrogram* noise_truth, const RtfVector& rtf,
                               const NoiseFloorCovariance& noise_floor, const BeamformerParams& params) {
  params.validate();
  const std::size_t total_channels = mixture.channels();
  const std::size_t bins = mixture.bins();
  const std::size_t frames = mixture.frames();
  if (rtf.bins() != bins || rtf.size() != total_channels) throw InvalidInput("RTF does not match the mixture");
  if (noise_floor.bins() != bins || noise_floor.size() != total_channels)
    throw InvalidInput("noise floor does not match the mixture");
  if (params.combiner.c.size() != total_channels) throw InvalidInput("combiner does not match the mixture");
  for (std::size_t ch : params.mask.channels())
    if (ch >= total_channels) throw InvalidInput("channel mask does not match the RTF");
  const Algorithm algorithm = params.algorithm;
  if (algorithm == Algorithm::oracle_mvdr) {
    if (noise_truth == nullptr) throw InvalidInput("oracle variant requires the true noise component");
    if (noise_truth->frames() != frames || noise_truth->bins() != bins || noise_truth->channels() != total_channels)
      throw InvalidInput("noise truth does not match the mixture");
  }

  const auto mask = params.mask.channels();
  const bool identity = params.mask.is_identity(total_channels);
  const std::size_t m = mask.size();
  const Spectrogram masked_x = identity ? Spectrogram{} : mixture.select_channels(mask);
  const Spectrogram& x = identity ? mixture : masked_x;
  Spectrogram masked_v;
  const Spectrogram* v = nullptr;
  if (algorithm == Algorithm::oracle_mvdr) {
    if (!identity) masked_v = noise_truth->select_channels(mask);
    v = identity ? noise_truth : &masked_v;
  }

  BinVectors h(bins, m);
  RVector h_norm_sq(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    auto src = rtf.at(k);
    auto dst = h.at(k);
    for (std::size_t i = 0; i < m; ++i) dst[i] = src[mask[i]];
    h_norm_sq[k] = std::pow(norm2(dst), 2);
    if (!(h_norm_sq[k] > 0.0)) throw InvalidInput("invalid steering vector");
  }
  const ReferenceCombiner combiner = params.combiner.restricted(mask);

  EnhancementResult result;
  result.output = Spectrogram(mixture.config(), frames, 1);
  result.mask = params.mask;
  result.weight_size = m;
  result.weights.assign(frames * bins * m, Complex{});
  result.noise_power.assign(frames * bins, 0.0);
  auto& diag = result.diagnostics;
  diag.test_statistic.assign(frames * bins, 0.0);
  diag.alpha.assign(frames * bins, 1.0);
  diag.weight_norm.assign(frames * bins, 0.0);
  diag.regularized.assign(frames * bins, 0);
  if (frames == 0) return result;

  const kernels::KernelTable& kern = kernels::active();
  const bool adaptive = algorithm == Algorithm::proposed || algorithm == Algorithm::adaptive_mpdr ||
                        algorithm == Algorithm::oracle_mvdr;

  CovarianceState state;
  switch (algorithm) {
    case Algorithm::fixed_mvdr: {
      const double fs = mixture.config().sample_rate;
      const auto training_samples = static_cast<std::size_t>(std::floor(params.training_seconds * fs));
      const std::size_t training_frames = std::min(frame_count(training_samples, mixture.config()), frames);
      if (training_frames == 0) throw InvalidInput("training segment shorter than one frame");
      state.cov = sample_covariance(x, 0, training_frames);
      break;
    }
    case Algorithm::fixed_mpdr:
      state.cov = sample_covariance(x, 0, frames);
      break;
    default:
      state.cov = identity ? static_cast<const BinMatrices&>(noise_floor) : noise_floor.select(mask);
      break;
  }

  DetectorParams detector = params.detector;
  if (algorithm == Algorithm::adaptive_mpdr) detector.eta = 1.0;

  // Current regularized weights per bin, recomputed only when Φ̂ changes.
  CVector w(bins * m);
  std::vector<bool> stale(bins, true);
  CVector scratch(m * m);
  RVector last_norm(bins, 0.0);
  std::vector<std::uint8_t> last_hit(bins, 0);
  RVector noise_power(bins, 0.0);

  if (algorithm == Algorithm::unprocessed) {
    for (std::size_t k = 0; k < bins; ++k) {
      std::copy(combiner.c.begin(), combiner.c.end(), w.begin() + static_cast<std::ptrdiff_t>(k * m));
      last_norm[k] = norm2(combiner.c);
      stale[k] = false;
    }
    kern.quadratic_forms(w.data(), state.cov.data().data(), noise_power.data(), bins, m);
  }

  CVector projections(bins);
  RVector x_norm_sq(bins);
  RVector alpha(bins);
  CVector y(bins);

  for (std::size_t l = 0; l < frames; ++l) {
    const Complex* frame_x = x.frame(l).data();
    kern.inner_products(h.data().data(), frame_x, projections.data(), bins, m);
    kern.norms_squared(frame_x, x_norm_sq.data(), bins, m);
    for (std::size_t k = 0; k < bins; ++k) {
      const double denom = x_norm_sq[k] * h_norm_sq[k];
      const double t = denom > 0.0 ? std::clamp(std::norm(projections[k]) / denom, 0.0, 1.0) : 0.0;
      diag.test_statistic[l * bins + k] = t;
      switch (algorithm) {
        case Algorithm::proposed:
        case Algorithm::adaptive_mpdr:
          alpha[k] = select_alpha(t, detector);
          break;
        case Algorithm::oracle_mvdr:
          alpha[k] = detector.alpha0;
          break;
        default:
          alpha[k] = 1.0;
          break;
      }
    }

    if (adaptive) {
      const Complex* source = algorithm == Algorithm::oracle_mvdr ? v->frame(l).data() : frame_x;
      kern.rank1_update(state.cov.data().data(), source, alpha.data(), bins, m);
      for (std::size_t k = 0; k < bins; ++k)
        if (alpha[k] != 1.0) stale[k] = true;
    }

    bool recomputed = false;
    for (std::size_t k = 0; k < bins; ++k) {
      if (!stale[k]) continue;
      recomputed = true;
      std::span<Complex> wk{w.data() + k * m, m};
      if (solve_mvdr(state.cov.at(k), h.at(k), wk, scratch)) ++diag.loading_retries;
      diag.max_distortionless_error = std::max(diag.max_distortionless_error, std::abs(inner(wk, h.at(k)) - 1.0));
      last_hit[k] = regularize(wk, params.rho) ? 1 : 0;
      last_norm[k] = norm2(wk);
      stale[k] = false;
    }
    if (recomputed || l == 0) kern.quadratic_forms(w.data(), state.cov.data().data(), noise_power.data(), bins, m);

    kern.inner_products(w.data(), frame_x, y.data(), bins, m);
    for (std::size_t k = 0; k < bins; ++k) {
      result.output.at(l, k, 0) = y[k];
      diag.alpha[l * bins + k] = alpha[k];
      diag.weight_norm[l * bins + k] = last_norm[k];
      diag.regularized[l * bins + k] = last_hit[k];
      result.noise_power[l * bins + k] = noise_power[k];
    }
    std::copy(w.begin(), w.end(), result.weights.begin() + static_cast<std::ptrdiff_t>(l * bins * m));
    state.frame = l + 1;
  }
  return result;
}

}  // namespace avs
