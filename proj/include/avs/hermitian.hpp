// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "avs/common.hpp"

namespace avs {

struct CholeskyStatus {
  bool ok = false;
  /// (max pivot / min pivot)², a cheap lower bound on the 2-norm condition number.
  double condition_estimate = 0.0;
};

/// In-place Cholesky factorization A = L Lᴴ of a row-major m×m Hermitian
/// matrix. Only the lower triangle of `a` is read; L overwrites it.
CholeskyStatus cholesky_factor(std::span<Complex> a, std::size_t m);

/// Solves L Lᴴ u = b in place given the factor from cholesky_factor.
void cholesky_solve(std::span<const Complex> l, std::size_t m, std::span<Complex> b);

/// Largest |A_ij − conj(A_ji)| over the matrix.
double hermitian_defect(std::span<const Complex> a, std::size_t m);

}  // namespace avs
