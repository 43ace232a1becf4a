#include "holodeconv/structured_linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holo {

TriangularSvd triangular_svd(int n) {
  if (n < 1) throw std::invalid_argument("triangular_svd: n must be >= 1");
  TriangularSvd t;
  t.n = n;
  t.u = RMat(n, n);
  t.v = RMat(n, n);
  t.sigma.resize(n);
  const double nh = n + 0.5;
  const double scale = 1.0 / std::sqrt(0.5 * n + 0.25);
  const double pi = std::numbers::pi;
  for (int s = 0; s < n; ++s) {
    const double a = (s + 0.5) * pi / nh;
    t.sigma[s] = 1.0 / std::sqrt(2.0 - 2.0 * std::cos(a));
    for (int r = 0; r < n; ++r) {
      t.u(r, s) = scale * std::sin(a * (r + 1.0));
      t.v(r, s) = scale * std::cos(a * (r + 0.5));
    }
  }
  for (int s = 0; s + 1 < n; ++s)
    if (!(t.sigma[s] > t.sigma[s + 1]))
      throw std::runtime_error("triangular_svd: singular values not descending");
  return t;
}

RMat ones_lower(int n) {
  RMat l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) l(i, j) = 1.0;
  return l;
}

RMat cholesky_solve(const RMat& g, const RMat& rhs) {
  const int p = g.rows();
  if (g.cols() != p || rhs.rows() != p)
    throw std::invalid_argument("cholesky_solve: shape mismatch");
  // Factor G = C C^T, C lower triangular.
  RMat c(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
      if (i == j) {
        if (s <= 0) throw std::runtime_error("cholesky_solve: matrix not positive definite");
        c(i, i) = std::sqrt(s);
      } else {
        c(i, j) = s / c(j, j);
      }
    }
  }
  // Forward then backward substitution, column by column.
  RMat z(p, rhs.cols());
  for (int col = 0; col < rhs.cols(); ++col) {
    std::vector<double> w(p);
    for (int i = 0; i < p; ++i) {
      double s = rhs(i, col);
      for (int k = 0; k < i; ++k) s -= c(i, k) * w[k];
      w[i] = s / c(i, i);
    }
    for (int i = p - 1; i >= 0; --i) {
      double s = w[i];
      for (int k = i + 1; k < p; ++k) s -= c(k, i) * z(k, col);
      z(i, col) = s / c(i, i);
    }
  }
  return z;
}

RMat pinv_naive(const RMat& a) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("pinv_naive: matrix has more columns than rows");
  const RMat at = transpose(a);
  const RMat g = matmul(at, a);
  return cholesky_solve(g, at);
}

}  // namespace holo
