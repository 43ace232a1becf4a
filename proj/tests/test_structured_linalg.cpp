#include "holodeconv/structured_linalg.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "holodeconv/mat.hpp"

namespace {

using holo::CMat;
using holo::RMat;

/// Cyclic Jacobi eigensolver for small symmetric matrices; the independent
/// oracle for the closed-form singular values.
std::vector<double> jacobi_eigenvalues(RMat a) {
  const int n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

RMat random_rmat(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RMat a(rows, cols);
  for (size_t i = 0; i < a.size(); ++i) a.data()[i] = dist(gen);
  return a;
}

CMat random_cmat(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CMat a(rows, cols);
  for (size_t i = 0; i < a.size(); ++i) a.data()[i] = holo::cxd(dist(gen), dist(gen));
  return a;
}

RMat reconstruct(const holo::TriangularSvd& t) {
  const int n = t.n;
  RMat rec(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int s = 0; s < n; ++s) acc += t.u(i, s) * t.sigma[s] * t.v(j, s);
      rec(i, j) = acc;
    }
  return rec;
}

TEST(TriangularSvd, SizeOneIsTrivial) {
  const auto t = holo::triangular_svd(1);
  EXPECT_NEAR(t.sigma[0], 1.0, 1e-14);
  EXPECT_NEAR(std::abs(t.u(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(t.v(0, 0)), 1.0, 1e-14);
}

TEST(TriangularSvd, GoldenRatioAtSizeTwo) {
  // The 2 x 2 Gram matrix [[2,1],[1,1]] has eigenvalues (3 +- sqrt 5)/2,
  // whose square roots are the golden ratio and its inverse.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto t = holo::triangular_svd(2);
  EXPECT_NEAR(t.sigma[0], phi, 1e-12);
  EXPECT_NEAR(t.sigma[1], 1.0 / phi, 1e-12);
}

TEST(TriangularSvd, MatchesJacobiEigenvaluesUpTo8) {
  for (int n = 1; n <= 8; ++n) {
    const RMat l = holo::ones_lower(n);
    const auto ev = jacobi_eigenvalues(holo::matmul(holo::transpose(l), l));
    const auto t = holo::triangular_svd(n);
    for (int s = 0; s < n; ++s)
      EXPECT_NEAR(t.sigma[s], std::sqrt(ev[s]), 1e-10) << "n=" << n << " s=" << s;
  }
}

TEST(TriangularSvd, FactorsAreOrthogonal) {
  for (int n : {1, 2, 3, 5, 8, 17, 64}) {
    const auto t = holo::triangular_svd(n);
    const RMat utu = holo::matmul(holo::transpose(t.u), t.u);
    const RMat vtv = holo::matmul(holo::transpose(t.v), t.v);
    const RMat eye = RMat::identity(n);
    EXPECT_LE(holo::max_abs_diff(utu, eye), 1e-12 * n) << "n=" << n;
    EXPECT_LE(holo::max_abs_diff(vtv, eye), 1e-12 * n) << "n=" << n;
  }
}

TEST(TriangularSvd, ReconstructsOnesLower) {
  for (int n : {1, 2, 3, 4, 7, 16, 33, 64, 256}) {
    const auto t = holo::triangular_svd(n);
    EXPECT_LE(holo::max_abs_diff(reconstruct(t), holo::ones_lower(n)), 1e-10 * n) << "n=" << n;
  }
}

TEST(TriangularSvd, SingularValuesDescendAndLargestGrowsLinearly) {
  const auto t = holo::triangular_svd(50);
  for (int s = 0; s + 1 < 50; ++s) EXPECT_GT(t.sigma[s], t.sigma[s + 1]);
  // sigma_0 ~ 1/(2 sin(pi/(2(2n+1)))) ~ (2n+1)/pi for large n.
  EXPECT_NEAR(t.sigma[0], (2 * 50 + 1) / M_PI, 1.0);
}

TEST(OnesLowerInverse, FirstDifferencesInvertCumulativeSums) {
  const int n = 6;
  const RMat l = holo::ones_lower(n);
  const CMat x = random_cmat(n, 4, 7);
  const CMat cums = holo::matmul(l, x);
  EXPECT_LE(holo::max_abs_diff(holo::apply_ones_lower_inverse(cums), x), 1e-12);
}

TEST(PinvNaive, IdentityAndStackedIdentity) {
  const RMat eye = RMat::identity(4);
  EXPECT_LE(holo::max_abs_diff(holo::pinv_naive(eye), eye), 1e-12);
  // [I; I]^+ = 0.5 [I, I].
  const RMat stacked = holo::vstack(eye, eye);
  const RMat dag = holo::pinv_naive(stacked);
  ASSERT_EQ(dag.rows(), 4);
  ASSERT_EQ(dag.cols(), 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_NEAR(dag(i, j), (j % 4 == i) ? 0.5 : 0.0, 1e-12);
}

TEST(PinvNaive, SatisfiesMoorePenroseOnRandomTallMatrix) {
  const RMat a = random_rmat(9, 4, 11);
  const RMat dag = holo::pinv_naive(a);
  // Full column rank: dag * a = I and a * dag * a = a.
  EXPECT_LE(holo::max_abs_diff(holo::matmul(dag, a), RMat::identity(4)), 1e-10);
  EXPECT_LE(holo::max_abs_diff(holo::matmul(a, holo::matmul(dag, a)), a), 1e-10);
}

TEST(PinvNaive, RejectsRankDeficiency) {
  RMat a(5, 3);
  for (int i = 0; i < 5; ++i) {
    a(i, 0) = i + 1.0;
    a(i, 1) = 2.0 * (i + 1.0);  // dependent column
    a(i, 2) = 1.0;
  }
  EXPECT_THROW(holo::pinv_naive(a), std::runtime_error);
}

TEST(ApplyKronPair, MatchesMaterializedKroneckerProduct) {
  const RMat a = random_rmat(3, 4, 21);
  const RMat b = random_rmat(2, 5, 22);
  const CMat x = random_cmat(5, 4, 23);
  const CMat fast = holo::apply_kron_pair(a, b, x);
  const auto big = holo::kron(a, b);
  const auto direct = holo::unvec(holo::matvec(big, holo::vec(x)), 2, 3);
  EXPECT_LE(holo::max_abs_diff(fast, direct), 1e-12);
}

TEST(VecConvention, ColumnMajorAgreesWithKroneckerIdentity) {
  // vec(B X A^T) = (A kron B) vec(X) holds only for column-major vec; this
  // pins the convention the whole library uses.
  const RMat a = random_rmat(3, 3, 31);
  const RMat b = random_rmat(3, 3, 32);
  const RMat x = random_rmat(3, 3, 33);
  const RMat lhs = holo::matmul(holo::matmul(b, x), holo::transpose(a));
  const auto rhs = holo::matvec(holo::kron(a, b), holo::vec(x));
  EXPECT_LE(holo::max_abs_diff(lhs, holo::unvec(rhs, 3, 3)), 1e-12);
}

}  // namespace
