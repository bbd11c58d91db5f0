// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batched per-bin complex kernels. Every kernel walks `bins` independent
// problems laid out back to back: vectors are bins * m complex values,
// matrices are bins * m * m values in row-major order.

#include <string_view>

#include "avs/common.hpp"

namespace avs::kernels {

struct KernelTable {
  std::string_view name;

  /// out[b] = w_bᴴ x_b
  void (*inner_products)(const Complex* w, const Complex* x, Complex* out, std::size_t bins, std::size_t m);

  /// out[b] = ‖x_b‖²
  void (*norms_squared)(const Complex* x, double* out, std::size_t bins, std::size_t m);

  /// cov_b ← α_b cov_b + (1 − α_b) x_b x_bᴴ. Bins with α_b == 1 are left
  /// untouched. The upper triangle is computed and mirrored, so the result is
  /// exactly Hermitian with a real diagonal.
  void (*rank1_update)(Complex* cov, const Complex* x, const double* alpha, std::size_t bins, std::size_t m);

  /// out[b] = Re(w_bᴴ cov_b w_b)
  void (*quadratic_forms)(const Complex* w, const Complex* cov, double* out, std::size_t bins, std::size_t m);
};

/// Portable reference implementation.
const KernelTable& scalar();

/// AVX2/FMA implementation, or nullptr when the build or the CPU lacks it.
const KernelTable* avx2();

/// Fastest table the running CPU supports. Setting AVS_KERNELS=scalar in the
/// environment forces the reference path. Resolved once per process.
const KernelTable& active();

}  // namespace avs::kernels
