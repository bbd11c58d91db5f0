// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <random>

#include "avs/common.hpp"

namespace avs::test {

inline CVector random_vector(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(m);
  for (auto& z : v) z = {n(rng), n(rng)};
  return v;
}

/// A Aᴴ + εI for a random complex A, row-major.
inline CVector random_pd(std::mt19937_64& rng, std::size_t m, double eps = 0.1) {
  const CVector a = random_vector(rng, m * m);
  CVector out(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += a[i * m + k] * std::conj(a[j * m + k]);
      out[i * m + j] = acc + (i == j ? eps : 0.0);
    }
  return out;
}

inline Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double quad(std::span<const Complex> w, std::span<const Complex> cov) {
  const std::size_t m = w.size();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) acc += std::conj(w[i]) * cov[i * m + j] * w[j];
  return acc.real();
}

inline RVector white(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  RVector x(n);
  for (double& v : x) v = g(rng);
  return x;
}

}  // namespace avs::test
