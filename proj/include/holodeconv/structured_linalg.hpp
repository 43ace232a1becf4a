#pragma once

#include <vector>

#include "holodeconv/mat.hpp"

namespace holo {

/// Closed-form singular value decomposition of the n x n lower-triangular
/// all-ones matrix L (L(i,j) = 1 for i >= j). L = U * diag(sigma) * V^T with
/// orthogonal U, V and sigma in strictly descending order. All factors are
/// evaluated from trigonometric formulas in O(n^2); no iterative solver runs.
struct TriangularSvd {
  int n = 0;
  RMat u;                     ///< left singular vectors, one per column
  RMat v;                     ///< right singular vectors, one per column
  std::vector<double> sigma;  ///< singular values, descending
};

TriangularSvd triangular_svd(int n);

/// The n x n lower-triangular all-ones matrix itself.
RMat ones_lower(int n);

/// Apply L^{-1} (first differences down each column): y(0,:) = g(0,:),
/// y(r,:) = g(r,:) - g(r-1,:). Works for real or complex matrices.
template <typename T>
Mat<T> apply_ones_lower_inverse(const Mat<T>& g) {
  Mat<T> y(g.rows(), g.cols());
  for (int j = 0; j < g.cols(); ++j) {
    y(0, j) = g(0, j);
    for (int i = 1; i < g.rows(); ++i) y(i, j) = g(i, j) - g(i - 1, j);
  }
  return y;
}

/// Dense Moore-Penrose pseudoinverse of a real matrix with full column rank,
/// computed via the normal equations and a Cholesky factorization.
/// Throws std::runtime_error if the Gram matrix is numerically rank deficient.
RMat pinv_naive(const RMat& a);

/// Evaluate (A kron B) vec(X) = vec(B X A^T) without materializing the
/// Kronecker product. X must be B.cols() x A.cols().
template <typename A, typename B, typename X>
Mat<mul_t<mul_t<A, B>, X>> apply_kron_pair(const Mat<A>& a, const Mat<B>& b, const Mat<X>& x) {
  if (x.rows() != b.cols() || x.cols() != a.cols())
    throw std::invalid_argument("apply_kron_pair: shape mismatch");
  return matmul(matmul(b, x), transpose(a));
}

/// Solve the symmetric positive definite system G z = rhs (one column per rhs
/// column) by Cholesky factorization. Throws on a non-positive pivot.
RMat cholesky_solve(const RMat& g, const RMat& rhs);

}  // namespace holo
