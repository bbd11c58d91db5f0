// SPDX-License-Identifier: Apache-2.0
#include "avs/hermitian.hpp"
#include "avs/kernels.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace avs;

namespace {

constexpr std::size_t kBins = 513;

// Relative tolerance for SIMD vs reference: FMA contraction and a different
// summation order are the only differences.
constexpr double kRel = 1e-13;

void compare_tables(const kernels::KernelTable& ref, const kernels::KernelTable& simd, std::size_t m) {
  std::mt19937_64 rng(100 + m);
  const CVector w = test::random_vector(rng, kBins * m);
  const CVector x = test::random_vector(rng, kBins * m);
  CVector cov(kBins * m * m);
  for (std::size_t b = 0; b < kBins; ++b) {
    const CVector p = test::random_pd(rng, m);
    std::copy(p.begin(), p.end(), cov.begin() + static_cast<std::ptrdiff_t>(b * m * m));
  }

  CVector ip_ref(kBins), ip_simd(kBins);
  ref.inner_products(w.data(), x.data(), ip_ref.data(), kBins, m);
  simd.inner_products(w.data(), x.data(), ip_simd.data(), kBins, m);
  for (std::size_t b = 0; b < kBins; ++b) CHECK(std::abs(ip_ref[b] - ip_simd[b]) <= kRel * (1.0 + std::abs(ip_ref[b])) * m);

  RVector n_ref(kBins), n_simd(kBins);
  ref.norms_squared(x.data(), n_ref.data(), kBins, m);
  simd.norms_squared(x.data(), n_simd.data(), kBins, m);
  for (std::size_t b = 0; b < kBins; ++b) CHECK(std::abs(n_ref[b] - n_simd[b]) <= kRel * n_ref[b] * m);

  RVector q_ref(kBins), q_simd(kBins);
  ref.quadratic_forms(w.data(), cov.data(), q_ref.data(), kBins, m);
  simd.quadratic_forms(w.data(), cov.data(), q_simd.data(), kBins, m);
  for (std::size_t b = 0; b < kBins; ++b) CHECK(std::abs(q_ref[b] - q_simd[b]) <= kRel * q_ref[b] * m * m);

  RVector alpha(kBins);
  for (std::size_t b = 0; b < kBins; ++b) alpha[b] = b % 3 == 0 ? 1.0 : 0.98;
  CVector c_ref = cov, c_simd = cov;
  ref.rank1_update(c_ref.data(), x.data(), alpha.data(), kBins, m);
  simd.rank1_update(c_simd.data(), x.data(), alpha.data(), kBins, m);
  for (std::size_t b = 0; b < kBins; ++b) {
    const std::span<const Complex> r(c_ref.data() + b * m * m, m * m), s(c_simd.data() + b * m * m, m * m);
    CHECK(hermitian_defect(s, m) == 0.0);
    for (std::size_t i = 0; i < m * m; ++i) CHECK(std::abs(r[i] - s[i]) <= kRel * (1.0 + std::abs(r[i])));
    if (alpha[b] == 1.0)
      for (std::size_t i = 0; i < m * m; ++i) CHECK(s[i] == cov[b * m * m + i]);
  }
}

}  // namespace

TEST_CASE("scalar kernels match direct evaluation") {
  std::mt19937_64 rng(3);
  const std::size_t m = 8, bins = 5;
  const CVector w = test::random_vector(rng, bins * m), x = test::random_vector(rng, bins * m);
  CVector cov(bins * m * m);
  for (std::size_t b = 0; b < bins; ++b) {
    const CVector p = test::random_pd(rng, m);
    std::copy(p.begin(), p.end(), cov.begin() + static_cast<std::ptrdiff_t>(b * m * m));
  }
  const auto& k = kernels::scalar();
  CVector ip(bins);
  RVector q(bins), n(bins);
  k.inner_products(w.data(), x.data(), ip.data(), bins, m);
  k.quadratic_forms(w.data(), cov.data(), q.data(), bins, m);
  k.norms_squared(x.data(), n.data(), bins, m);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::span<const Complex> wb(w.data() + b * m, m), xb(x.data() + b * m, m), cb(cov.data() + b * m * m, m * m);
    CHECK(std::abs(ip[b] - test::dot(wb, xb)) < 1e-12);
    CHECK(q[b] == doctest::Approx(test::quad(wb, cb)).epsilon(1e-12));
    CHECK(n[b] == doctest::Approx(test::dot(xb, xb).real()).epsilon(1e-12));
  }
  RVector alpha(bins, 0.9);
  CVector updated = cov;
  k.rank1_update(updated.data(), x.data(), alpha.data(), bins, m);
  for (std::size_t b = 0; b < bins; ++b)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Complex expect = 0.9 * cov[b * m * m + i * m + j] + 0.1 * x[b * m + i] * std::conj(x[b * m + j]);
        CHECK(std::abs(updated[b * m * m + i * m + j] - expect) < 1e-12);
      }
}

TEST_CASE("AVX2 kernels are equivalent to the scalar reference") {
  const kernels::KernelTable* simd = kernels::avx2();
  if (simd == nullptr) {
    MESSAGE("AVX2 not available on this CPU; equivalence test skipped");
    return;
  }
  for (std::size_t m : {1u, 2u, 3u, 8u}) {
    CAPTURE(m);
    compare_tables(kernels::scalar(), *simd, m);
  }
}

TEST_CASE("active table is one of the known tables") {
  const auto& active = kernels::active();
  const bool known = &active == &kernels::scalar() || &active == kernels::avx2();
  CHECK(known);
}

TEST_CASE("Cholesky solve reproduces a random PD system") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 8;
    const CVector a = test::random_pd(rng, m);
    const CVector x = test::random_vector(rng, m);
    CVector b(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) b[i] += a[i * m + j] * x[j];
    CVector l = a;
    const CholeskyStatus st = cholesky_factor(l, m);
    REQUIRE(st.ok);
    CHECK(st.condition_estimate >= 1.0);
    cholesky_solve(l, m, b);
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(b[i] - x[i]) < 1e-8 * (1.0 + std::abs(x[i])));
  }
}

TEST_CASE("Cholesky reports failure on an indefinite matrix") {
  CVector a{1.0, 0.0, 0.0, -1.0};
  CHECK_FALSE(cholesky_factor(a, 2).ok);
}

TEST_CASE("hermitian defect") {
  CVector a{1.0, Complex(1, 2), Complex(1, -2), 3.0};
  CHECK(hermitian_defect(a, 2) == 0.0);
  a[1] = Complex(1, 2.5);
  CHECK(hermitian_defect(a, 2) == doctest::Approx(0.5));
}
