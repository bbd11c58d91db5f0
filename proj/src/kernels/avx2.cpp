// SPDX-License-Identifier: Apache-2.0
#include "avs/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define AVS_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define AVS_HAVE_AVX2_KERNELS 0
#endif

namespace avs::kernels {

#if AVS_HAVE_AVX2_KERNELS
namespace {

#define AVS_TARGET __attribute__((target("avx2,fma")))

// Two interleaved complex doubles per register: [re0 im0 re1 im1].
AVS_TARGET inline __m256d load2(const Complex* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
AVS_TARGET inline void store2(Complex* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
AVS_TARGET inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

AVS_TARGET inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sum of even lanes minus sum of odd lanes.
AVS_TARGET inline double hsum_alternating(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_sub_sd(s, _mm_unpackhi_pd(s, s)));
}

AVS_TARGET void inner_products(const Complex* w, const Complex* x, Complex* out, std::size_t bins, std::size_t m) {
  const std::size_t pairs = m / 2;
  for (std::size_t b = 0; b < bins; ++b, w += m, x += m) {
    __m256d direct = _mm256_setzero_pd();   // wr xr, wi xi
    __m256d crossed = _mm256_setzero_pd();  // wr xi, wi xr
    for (std::size_t p = 0; p < pairs; ++p) {
      const __m256d wv = load2(w + 2 * p);
      const __m256d xv = load2(x + 2 * p);
      direct = _mm256_fmadd_pd(wv, xv, direct);
      crossed = _mm256_fmadd_pd(wv, swap_pairs(xv), crossed);
    }
    double re = hsum(direct);
    double im = hsum_alternating(crossed);
    if (m % 2) {
      const Complex wt = w[m - 1], xt = x[m - 1];
      re += wt.real() * xt.real() + wt.imag() * xt.imag();
      im += wt.real() * xt.imag() - wt.imag() * xt.real();
    }
    out[b] = {re, im};
  }
}

AVS_TARGET void norms_squared(const Complex* x, double* out, std::size_t bins, std::size_t m) {
  const std::size_t pairs = m / 2;
  for (std::size_t b = 0; b < bins; ++b, x += m) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t p = 0; p < pairs; ++p) {
      const __m256d xv = load2(x + 2 * p);
      acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    double s = hsum(acc);
    if (m % 2) s += std::norm(x[m - 1]);
    out[b] = s;
  }
}

AVS_TARGET void rank1_update(Complex* cov, const Complex* x, const double* alpha, std::size_t bins, std::size_t m) {
  const std::size_t pairs = m / 2;
  const __m256d conj_mask = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  for (std::size_t b = 0; b < bins; ++b, cov += m * m, x += m) {
    const double a = alpha[b];
    if (a == 1.0) continue;
    const double g = 1.0 - a;
    const __m256d av = _mm256_set1_pd(a);
    const __m256d gv = _mm256_set1_pd(g);
    for (std::size_t i = 0; i < m; ++i) {
      Complex* row = cov + i * m;
      const __m256d xr = _mm256_set1_pd(x[i].real());
      const __m256d xi = _mm256_set1_pd(x[i].imag());
      // Columns from the pair containing the diagonal onward; the lower
      // triangle is restored from the upper one below.
      for (std::size_t p = i / 2; p < pairs; ++p) {
        const __m256d y = _mm256_mul_pd(load2(x + 2 * p), conj_mask);
        const __m256d prod = _mm256_fmaddsub_pd(xr, y, _mm256_mul_pd(xi, swap_pairs(y)));
        store2(row + 2 * p, _mm256_fmadd_pd(gv, prod, _mm256_mul_pd(av, load2(row + 2 * p))));
      }
      if (m % 2) {
        const Complex xt = x[m - 1];
        const double pr = x[i].real() * xt.real() + x[i].imag() * xt.imag();
        const double pi = x[i].imag() * xt.real() - x[i].real() * xt.imag();
        row[m - 1] = {a * row[m - 1].real() + g * pr, a * row[m - 1].imag() + g * pi};
      }
      row[i] = {row[i].real(), 0.0};
    }
    for (std::size_t i = 1; i < m; ++i)
      for (std::size_t j = 0; j < i; ++j) cov[i * m + j] = std::conj(cov[j * m + i]);
  }
}

AVS_TARGET void quadratic_forms(const Complex* w, const Complex* cov, double* out, std::size_t bins,
                                std::size_t m) {
  const std::size_t pairs = m / 2;
  for (std::size_t b = 0; b < bins; ++b, w += m, cov += m * m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Complex* row = cov + i * m;
      __m256d direct = _mm256_setzero_pd();   // rr wr, ri wi
      __m256d crossed = _mm256_setzero_pd();  // rr wi, ri wr
      for (std::size_t p = 0; p < pairs; ++p) {
        const __m256d rv = load2(row + 2 * p);
        const __m256d wv = load2(w + 2 * p);
        direct = _mm256_fmadd_pd(rv, wv, direct);
        crossed = _mm256_fmadd_pd(rv, swap_pairs(wv), crossed);
      }
      double re = hsum_alternating(direct);
      double im = hsum(crossed);
      if (m % 2) {
        const Complex r = row[m - 1], wt = w[m - 1];
        re += r.real() * wt.real() - r.imag() * wt.imag();
        im += r.real() * wt.imag() + r.imag() * wt.real();
      }
      acc += w[i].real() * re + w[i].imag() * im;
    }
    out[b] = acc;
  }
}

#undef AVS_TARGET

constexpr KernelTable kAvx2{"avx2", inner_products, norms_squared, rank1_update, quadratic_forms};

}  // namespace

const KernelTable* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2() { return nullptr; }

#endif

}  // namespace avs::kernels
