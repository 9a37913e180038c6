#pragma once

#include "rcae/matrix.hpp"

namespace rcae {

/// Thin singular value decomposition A = u * diag(singular_values) * vt with
/// r = min(rows, cols) factors. Columns of u are orthonormal, rows of vt are
/// orthonormal, singular values are sorted non-increasing. Factors are
/// deterministic: the first nonzero entry of each left singular vector is
/// non-negative.
struct SvdFactors {
  Matrix u;             // rows x r
  Vec singular_values;  // length r, non-increasing, >= 0
  Matrix vt;            // r x cols

  Matrix reconstruct() const;
  /// u[:, :k] * diag(s[:k]) * vt[:k, :]
  Matrix truncated(int k) const;
};

/// One-sided Jacobi SVD. Accurate for the small and medium dense matrices
/// used here; iteration cap 100 sweeps. Throws std::runtime_error with the
/// sweep count on non-convergence.
SvdFactors svd(const Matrix& a);

/// Squared Ky-Fan k-antinorm: sum of squared singular values beyond the
/// k-th. Zero iff rank(a) <= k. Throws std::invalid_argument when
/// k > min(rows, cols) or k < 0.
double kyfan_antinorm_sq(const Matrix& a, int k);

/// Best Frobenius rank-k approximation (Eckart-Young truncation).
Matrix truncate_rank(const Matrix& a, int k);

/// SVD of the product jd * je without forming it at full precision loss:
/// QR of jd, LQ of je, then the SVD of the small d x d core. jd is n x d,
/// je is d x n with d <= n; the result carries r = n singular values, the
/// trailing n - d of which are exact zeros.
SvdFactors svd_of_product(const Matrix& jd, const Matrix& je);

/// Norm of the wedge product of two equal-length vectors, via the Lagrange
/// identity ||a ^ b||^2 = ||a||^2 ||b||^2 - (a . b)^2. Zero iff a, b are
/// linearly dependent.
double wedge_norm(const Vec& a, const Vec& b);

/// Thin Householder QR: a (m x n, m >= n) = q (m x n, orthonormal columns)
/// * r (n x n, upper triangular).
struct QrFactors {
  Matrix q;
  Matrix r;
};
QrFactors qr(const Matrix& a);

}  // namespace rcae
