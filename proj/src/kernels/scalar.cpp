// SPDX-License-Identifier: Apache-2.0
#include "avs/kernels.hpp"

namespace avs::kernels {
namespace {

void inner_products(const Complex* w, const Complex* x, Complex* out, std::size_t bins, std::size_t m) {
  for (std::size_t b = 0; b < bins; ++b, w += m, x += m) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      re += w[i].real() * x[i].real() + w[i].imag() * x[i].imag();
      im += w[i].real() * x[i].imag() - w[i].imag() * x[i].real();
    }
    out[b] = {re, im};
  }
}

void norms_squared(const Complex* x, double* out, std::size_t bins, std::size_t m) {
  for (std::size_t b = 0; b < bins; ++b, x += m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    out[b] = acc;
  }
}

void rank1_update(Complex* cov, const Complex* x, const double* alpha, std::size_t bins, std::size_t m) {
  for (std::size_t b = 0; b < bins; ++b, cov += m * m, x += m) {
    const double a = alpha[b];
    if (a == 1.0) continue;
    const double g = 1.0 - a;
    for (std::size_t i = 0; i < m; ++i) {
      Complex* row = cov + i * m;
      const double xr = x[i].real(), xi = x[i].imag();
      row[i] = {a * row[i].real() + g * (xr * xr + xi * xi), 0.0};
      for (std::size_t j = i + 1; j < m; ++j) {
        // x_i conj(x_j)
        const double pr = xr * x[j].real() + xi * x[j].imag();
        const double pi = xi * x[j].real() - xr * x[j].imag();
        row[j] = {a * row[j].real() + g * pr, a * row[j].imag() + g * pi};
        cov[j * m + i] = std::conj(row[j]);
      }
    }
  }
}

void quadratic_forms(const Complex* w, const Complex* cov, double* out, std::size_t bins, std::size_t m) {
  for (std::size_t b = 0; b < bins; ++b, w += m, cov += m * m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      // (cov w)_i
      double re = 0.0, im = 0.0;
      const Complex* row = cov + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        re += row[j].real() * w[j].real() - row[j].imag() * w[j].imag();
        im += row[j].real() * w[j].imag() + row[j].imag() * w[j].real();
      }
      acc += w[i].real() * re + w[i].imag() * im;
    }
    out[b] = acc;
  }
}

constexpr KernelTable kScalar{"scalar", inner_products, norms_squared, rank1_update, quadratic_forms};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace avs::kernels
