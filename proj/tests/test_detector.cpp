// SPDX-License-Identifier: Apache-2.0
#include "avs/detector.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace avs;

TEST_CASE("test statistic of a scaled steering vector is one") {
  std::mt19937_64 rng(41);
  const CVector h = test::random_vector(rng, 8);
  CVector x(8);
  for (std::size_t i = 0; i < 8; ++i) x[i] = 3.7 * std::polar(1.0, 1.234) * h[i];
  CHECK(test_statistic(x, h) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("orthogonal data gives zero") {
  const CVector h{1.0, 0.0, Complex(0, 1), 0.0};
  const CVector x{Complex(0, 1), 5.0, 1.0, -2.0};  // hᴴx = 0·... + (−j)(1) + j... = 0
  CHECK(test_statistic(x, h) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(test_statistic(CVector(4, 0.0), h) == 0.0);
}

TEST_CASE("test statistic matches a Gram-Schmidt decomposition") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const CVector x = test::random_vector(rng, 8), h = test::random_vector(rng, 8);
    double hn = 0.0;
    for (auto z : h) hn += std::norm(z);
    CVector u(8);
    for (std::size_t i = 0; i < 8; ++i) u[i] = h[i] / std::sqrt(hn);
    const Complex along = test::dot(u, x);
    double residual = 0.0;
    for (std::size_t i = 0; i < 8; ++i) residual += std::norm(x[i] - u[i] * along);
    const double expected = std::norm(along) / (std::norm(along) + residual);
    CHECK(std::abs(test_statistic(x, h) - expected) <= 1e-12);
  }
}

TEST_CASE("test statistic is scale invariant and bounded") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const CVector x = test::random_vector(rng, 8), h = test::random_vector(rng, 8);
    CVector xs = x, hs = h;
    for (auto& z : xs) z *= Complex(-2.0, 0.3);
    for (auto& z : hs) z *= Complex(0.0, 1e-3);
    const double t = test_statistic(x, h);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    CHECK(test_statistic(xs, hs) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("mismatched sizes and zero steering vectors are rejected") {
  CHECK_THROWS_AS(test_statistic(CVector(8, 1.0), CVector(7, 1.0)), InvalidInput);
  CHECK_THROWS_AS(test_statistic(CVector(8, 1.0), CVector(8, 0.0)), InvalidInput);
}

TEST_CASE("smoothing factor selection") {
  const DetectorParams p;
  CHECK(p.eta == 0.9);
  CHECK(p.alpha0 == 0.98);
  CHECK(select_alpha(0.95, p) == 1.0);
  CHECK(select_alpha(0.9, p) == 1.0);
  CHECK(select_alpha(0.5, p) == 0.98);
  DetectorParams mpdr = p;
  mpdr.eta = 1.0;
  CHECK(select_alpha(0.999999, mpdr) == 0.98);
  CHECK_THROWS_AS(select_alpha(1.5, p), InvalidInput);
  DetectorParams bad = p;
  bad.alpha0 = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("time constant of the smoothing factor") {
  CHECK(alpha_to_tau(0.98, 16000, 128) == doctest::Approx(0.396).epsilon(0.001 / 0.396));
  CHECK(std::abs(alpha_to_tau(0.98, 16000, 128) - 0.396) <= 0.001);
  CHECK(alpha_to_tau(std::exp(-1.0), 16000, 16000) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tau_to_alpha(alpha_to_tau(0.5, 16000, 128), 16000, 128) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(alpha_to_tau(1.0, 16000, 128), InvalidInput);
  CHECK_THROWS_AS(alpha_to_tau(0.0, 16000, 128), InvalidInput);
}
