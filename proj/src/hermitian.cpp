// SPDX-License-Identifier: Apache-2.0
#include "avs/hermitian.hpp"

#include <algorithm>
#include <limits>

namespace avs {

CholeskyStatus cholesky_factor(std::span<Complex> a, std::size_t m) {
  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j].real();
    for (std::size_t p = 0; p < j; ++p) d -= std::norm(a[j * m + p]);
    if (!(d > 0.0) || !std::isfinite(d)) return {false, std::numeric_limits<double>::infinity()};
    const double pivot = std::sqrt(d);
    max_pivot = std::max(max_pivot, pivot);
    min_pivot = std::min(min_pivot, pivot);
    a[j * m + j] = pivot;
    const double inv = 1.0 / pivot;
    for (std::size_t i = j + 1; i < m; ++i) {
      Complex s = a[i * m + j];
      for (std::size_t p = 0; p < j; ++p) s -= a[i * m + p] * std::conj(a[j * m + p]);
      a[i * m + j] = s * inv;
    }
  }
  const double ratio = max_pivot / min_pivot;
  return {true, ratio * ratio};
}

void cholesky_solve(std::span<const Complex> l, std::size_t m, std::span<Complex> b) {
  // L y = b
  for (std::size_t i = 0; i < m; ++i) {
    Complex s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= l[i * m + p] * b[p];
    b[i] = s / l[i * m + i].real();
  }
  // Lᴴ u = y
  for (std::size_t i = m; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t p = i + 1; p < m; ++p) s -= std::conj(l[p * m + i]) * b[p];
    b[i] = s / l[i * m + i].real();
  }
}

double hermitian_defect(std::span<const Complex> a, std::size_t m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) worst = std::max(worst, std::abs(a[i * m + j] - std::conj(a[j * m + i])));
  return worst;
}

}  // namespace avs
