#include "holodeconv/recovery.hpp"

#include <chrono>
#include <stdexcept>

#include "holodeconv/structured_linalg.hpp"

namespace holo {

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::DualFast: return "dual";
    case Method::DualNaive: return "dual_naive";
    case Method::BlockSingle: return "block";
    case Method::PinholeSingle: return "pinhole";
    case Method::HioPlain: return "hio_a";
    case Method::HioBlock: return "hio_b";
    case Method::HioPinhole: return "hio_c";
  }
  return "?";
}

RecoveryResult recover_dual_fast(const DiffractionData& d, int n) {
  const auto t0 = clock_t_::now();
  const auto corr = extract_cross_correlations(autocorrelation_from_data(d, n));
  const TriangularSvd t = triangular_svd(n);
  const RMat ut = transpose(t.u);
  const RMat vt = transpose(t.v);
  // Rotate both windows into the singular bases, blend with the closed-form
  // weights, and rotate back: X = V Q V^T.
  CMat h1 = matmul(matmul(ut, corr.cb), t.u);
  CMat h2 = matmul(matmul(vt, corr.cp), t.v);
  CMat q(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      const double ss = t.sigma[r] * t.sigma[s];
      q(r, s) = (ss * h1(r, s) + h2(r, s)) / (ss * ss + 1.0);
    }
  RecoveryResult res;
  res.x_hat = matmul(matmul(t.v, q), vt);
  res.method = Method::DualFast;
  res.wall_time_s = seconds_since(t0);
  return res;
}

RecoveryResult recover_dual_naive(const DiffractionData& d, int n, int cap) {
  if (n > cap)
    throw std::invalid_argument("recover_dual_naive: n exceeds the dense-solver cap");
  const auto t0 = clock_t_::now();
  const auto corr = extract_cross_correlations(autocorrelation_from_data(d, n));
  const RMat l = ones_lower(n);
  const RMat sys = vstack(kron(l, l), RMat::identity(n * n));
  const RMat dag = pinv_naive(sys);
  std::vector<cxd> b = vec(corr.cb);
  const std::vector<cxd> bp = vec(corr.cp);
  b.insert(b.end(), bp.begin(), bp.end());
  // Apply the real pseudoinverse to the complex right-hand side.
  std::vector<cxd> x(size_t(n) * n);
  for (int i = 0; i < n * n; ++i) {
    cxd acc = 0;
    for (int j = 0; j < 2 * n * n; ++j) acc += dag(i, j) * b[j];
    x[i] = acc;
  }
  RecoveryResult res;
  res.x_hat = unvec(x, n, n);
  res.method = Method::DualNaive;
  res.wall_time_s = seconds_since(t0);
  return res;
}

RecoveryResult recover_single(const DiffractionData& d, int n, ReferenceKind kind) {
  if (kind != ReferenceKind::Block && kind != ReferenceKind::Pinhole)
    throw std::invalid_argument("recover_single: kind must be Block or Pinhole");
  const auto t0 = clock_t_::now();
  const auto corr = extract_cross_correlations(autocorrelation_from_data(d, n));
  RecoveryResult res;
  if (kind == ReferenceKind::Pinhole) {
    res.x_hat = corr.cb;
    res.method = Method::PinholeSingle;
  } else {
    // Invert cb = L X L^T: first differences down rows, then along columns.
    const CMat rows = apply_ones_lower_inverse(corr.cb);
    res.x_hat = transpose(apply_ones_lower_inverse(transpose(rows)));
    res.method = Method::BlockSingle;
  }
  res.wall_time_s = seconds_since(t0);
  return res;
}

CMat build_t_columns(int n, int m, const std::vector<std::pair<int, int>>& freqs,
                     ReferenceKind kind, int cap) {
  if (n > cap) throw std::invalid_argument("build_t_columns: n exceeds the oracle cap");
  if (m < 4 * n - 1) throw std::invalid_argument("build_t_columns: need m >= 4n - 1");
  if (kind == ReferenceKind::None)
    throw std::invalid_argument("build_t_columns: no linear map for a bare specimen");

  // Precompute the dense pseudoinverses the small-scale solvers use so each
  // indicator column reuses them.
  const RMat l = ones_lower(n);
  RMat dual_dag, block_dag;
  if (kind == ReferenceKind::Dual)
    dual_dag = pinv_naive(vstack(kron(l, l), RMat::identity(n * n)));
  if (kind == ReferenceKind::Block) block_dag = pinv_naive(kron(l, l));

  CMat t(n * n, int(freqs.size()));
  DiffractionData e;
  e.m = m;
  e.y = RMat(m, m);
  for (size_t c = 0; c < freqs.size(); ++c) {
    const auto [k1, k2] = freqs[c];
    if (k1 < 0 || k1 >= m || k2 < 0 || k2 >= m)
      throw std::invalid_argument("build_t_columns: frequency out of range");
    e.y(k1, k2) = 1.0;
    const auto corr = extract_cross_correlations(autocorrelation_from_data(e, n));
    std::vector<cxd> x;
    if (kind == ReferenceKind::Dual) {
      std::vector<cxd> b = vec(corr.cb);
      const std::vector<cxd> bp = vec(corr.cp);
      b.insert(b.end(), bp.begin(), bp.end());
      x.assign(size_t(n) * n, 0);
      for (int i = 0; i < n * n; ++i) {
        cxd acc = 0;
        for (int j = 0; j < 2 * n * n; ++j) acc += dual_dag(i, j) * b[j];
        x[i] = acc;
      }
    } else if (kind == ReferenceKind::Block) {
      const std::vector<cxd> b = vec(corr.cb);
      x.assign(size_t(n) * n, 0);
      for (int i = 0; i < n * n; ++i) {
        cxd acc = 0;
        for (int j = 0; j < n * n; ++j) acc += block_dag(i, j) * b[j];
        x[i] = acc;
      }
    } else {  // Pinhole
      x = vec(corr.cb);
    }
    for (int i = 0; i < n * n; ++i) t(i, int(c)) = x[i];
    e.y(k1, k2) = 0.0;
  }
  return t;
}

}  // namespace holo
