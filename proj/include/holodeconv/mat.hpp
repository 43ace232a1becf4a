#pragma once

#include <complex>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace holo {

using cxd = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Scalar type of a product between entries of type A and B.
template <typename A, typename B>
using mul_t = std::conditional_t<is_complex<A>::value || is_complex<B>::value, cxd, double>;

/// Dense row-major matrix. Complex entries are stored interleaved (re, im)
/// as guaranteed by std::complex layout.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  T& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using RMat = Mat<double>;
using CMat = Mat<cxd>;

template <typename A, typename B>
Mat<mul_t<A, B>> matmul(const Mat<A>& a, const Mat<B>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Mat<mul_t<A, B>> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const auto aik = a(i, k);
      if (aik == A{}) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

template <typename A, typename B>
std::vector<mul_t<A, B>> matvec(const Mat<A>& a, const std::vector<B>& x) {
  if (a.cols() != int(x.size())) throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<mul_t<A, B>> y(a.rows(), mul_t<A, B>{});
  for (int i = 0; i < a.rows(); ++i) {
    mul_t<A, B> acc{};
    for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    y[i] = acc;
  }
  return y;
}

template <typename T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline CMat adjoint(const CMat& a) {
  CMat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

/// Column-major flattening: vec(X)[i + rows*j] = X(i, j).
template <typename T>
std::vector<T> vec(const Mat<T>& a) {
  std::vector<T> v(a.size());
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) v[size_t(i) + size_t(a.rows()) * j] = a(i, j);
  return v;
}

/// Inverse of vec: reshape a column-major vector into rows x cols.
template <typename T>
Mat<T> unvec(const std::vector<T>& v, int rows, int cols) {
  if (int(v.size()) != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  Mat<T> a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = v[size_t(i) + size_t(rows) * j];
  return a;
}

/// Kronecker product; (A kron B)(i*Br+k, j*Bc+l) = A(i,j) * B(k,l).
template <typename A, typename B>
Mat<mul_t<A, B>> kron(const Mat<A>& a, const Mat<B>& b) {
  Mat<mul_t<A, B>> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const auto aij = a(i, j);
      for (int p = 0; p < b.rows(); ++p)
        for (int q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

/// Stack A on top of B (same column count).
template <typename T>
Mat<T> vstack(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column counts differ");
  Mat<T> s(a.rows() + b.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s(i, j) = a(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s(a.rows() + i, j) = b(i, j);
  return s;
}

template <typename T>
double frob_norm_sq(const Mat<T>& a) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += std::norm(cxd(a.data()[i]));
  return s;
}

template <typename T>
double frob_norm(const Mat<T>& a) {
  return std::sqrt(frob_norm_sq(a));
}

template <typename A, typename B>
double max_abs_diff(const Mat<A>& a, const Mat<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(cxd(a.data()[i]) - cxd(b.data()[i])));
  return m;
}

template <typename A, typename B>
double rel_frob_diff(const Mat<A>& a, const Mat<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("rel_frob_diff: shape mismatch");
  double num = 0, den = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(cxd(a.data()[i]) - cxd(b.data()[i]));
    den += std::norm(cxd(a.data()[i]));
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace holo
