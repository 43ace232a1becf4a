#include "holodeconv/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holodeconv/recovery.hpp"
#include "holodeconv/structured_linalg.hpp"

namespace holo {

namespace {

// Column k of the row-lag phase factor: entries exp(2 pi i k lag / m) for the
// n lags starting at `lag0`.
CMat phase_factor(int n, int m, int lag0) {
  CMat f(n, m);
  const double w = 2.0 * std::numbers::pi / m;
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < m; ++k) f(r, k) = std::polar(1.0, w * k * (r + lag0));
  return f;
}

std::vector<double> column_norms_sq(const CMat& g) {
  std::vector<double> c(g.cols(), 0.0);
  for (int j = 0; j < g.cols(); ++j) {
    double s = 0;
    for (int i = 0; i < g.rows(); ++i) s += std::norm(g(i, j));
    c[j] = s;
  }
  return c;
}

}  // namespace

WeightMapEvaluator::WeightMapEvaluator(int n, int m, ReferenceKind kind)
    : n_(n), m_(m), kind_(kind) {
  if (n < 1) throw std::invalid_argument("WeightMapEvaluator: n must be >= 1");
  if (m < 4 * n - 1) throw std::invalid_argument("WeightMapEvaluator: need m >= 4n - 1");
  // Phases of the two lag windows the recovery consumes: rows of the first
  // span lags -(n-1)..0, rows of the second span -(2n-1)..-n.
  const CMat p1f = phase_factor(n, m, -(n - 1));
  const CMat p2f = phase_factor(n, m, -(2 * n - 1));
  switch (kind) {
    case ReferenceKind::Dual: {
      const TriangularSvd t = triangular_svd(n);
      const RMat ut = transpose(t.u);
      const RMat vt = transpose(t.v);
      const CMat a1 = matmul(ut, p1f);  // pairs k1 in the cumulative-sum term
      const CMat b1 = matmul(ut, p2f);  // pairs k2 in the cumulative-sum term
      const CMat a2 = matmul(vt, p2f);  // pairs k1 in the direct term
      const CMat b2 = matmul(vt, p1f);  // pairs k2 in the direct term
      pa1_ = RMat(n, m);
      pa2_ = RMat(n, m);
      z_ = CMat(n, m);
      RMat qb1(n, m), qb2(n, m);
      CMat w(n, m);
      for (int r = 0; r < n; ++r)
        for (int k = 0; k < m; ++k) {
          pa1_(r, k) = std::norm(a1(r, k));
          pa2_(r, k) = std::norm(a2(r, k));
          z_(r, k) = a1(r, k) * std::conj(a2(r, k));
          qb1(r, k) = std::norm(b1(r, k));
          qb2(r, k) = std::norm(b2(r, k));
          w(r, k) = b1(r, k) * std::conj(b2(r, k));
        }
      RMat kern1(n, n), kern2(n, n), kern3(n, n);
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double ss = t.sigma[r] * t.sigma[s];
          const double den = ss * ss + 1.0;
          const double w1 = ss / den;
          const double w2 = 1.0 / den;
          kern1(r, s) = w1 * w1;
          kern2(r, s) = w2 * w2;
          kern3(r, s) = w1 * w2;
        }
      m1_ = matmul(kern1, qb1);
      m2_ = matmul(kern2, qb2);
      m3_ = matmul(kern3, w);
      break;
    }
    case ReferenceKind::Block: {
      c1_ = column_norms_sq(apply_ones_lower_inverse(p1f));
      c2_ = column_norms_sq(apply_ones_lower_inverse(p2f));
      break;
    }
    case ReferenceKind::Pinhole: {
      c1_ = column_norms_sq(p1f);
      c2_ = column_norms_sq(p2f);
      break;
    }
    case ReferenceKind::None:
      throw std::invalid_argument("WeightMapEvaluator: no weight map for a bare specimen");
  }
}

double WeightMapEvaluator::eval(int k1, int k2) const {
  if (k1 < 0 || k1 >= m_ || k2 < 0 || k2 >= m_)
    throw std::invalid_argument("WeightMapEvaluator::eval: frequency out of range");
  const double inv_m4 = 1.0 / (double(m_) * m_ * m_ * m_);
  if (kind_ != ReferenceKind::Dual) return c1_[k1] * c2_[k2] * inv_m4;
  double acc = 0;
  double cross = 0;
  for (int r = 0; r < n_; ++r) {
    acc += pa1_(r, k1) * m1_(r, k2) + pa2_(r, k1) * m2_(r, k2);
    const cxd zc = z_(r, k1) * m3_(r, k2);
    cross += zc.real();
  }
  return (acc + 2.0 * cross) * inv_m4;
}

WeightMap WeightMapEvaluator::grid(int stride) const {
  if (stride < 1) throw std::invalid_argument("WeightMapEvaluator::grid: stride must be >= 1");
  const int g = (m_ + stride - 1) / stride;
  WeightMap map;
  map.n = n_;
  map.m = m_;
  map.stride = stride;
  map.kind = kind_;
  map.s = RMat(g, g);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) map.s(i, j) = eval(i * stride, j * stride);
  return map;
}

WeightMap weight_map_closed_form(int n, int m, ReferenceKind kind, int stride) {
  return WeightMapEvaluator(n, m, kind).grid(stride);
}

WeightMap weight_map_direct(int n, int m, ReferenceKind kind) {
  std::vector<std::pair<int, int>> freqs;
  freqs.reserve(size_t(m) * m);
  // Column-major enumeration: k1 varies fastest, matching vec ordering.
  for (int k2 = 0; k2 < m; ++k2)
    for (int k1 = 0; k1 < m; ++k1) freqs.emplace_back(k1, k2);
  const CMat t = build_t_columns(n, m, freqs, kind);
  WeightMap map;
  map.n = n;
  map.m = m;
  map.stride = 1;
  map.kind = kind;
  map.s = RMat(m, m);
  for (size_t c = 0; c < freqs.size(); ++c) {
    double s = 0;
    for (int i = 0; i < n * n; ++i) s += std::norm(t(i, int(c)));
    map.s(freqs[c].first, freqs[c].second) = s;
  }
  return map;
}

ErrorReport expected_error(const WeightMap& s, const DiffractionData& y, double n_photons,
                           std::optional<double> specimen_norm_sq) {
  if (s.stride != 1) throw std::invalid_argument("expected_error: need a stride-1 map");
  if (s.m != y.m || y.y.rows() != y.m || s.s.rows() != s.m)
    throw std::invalid_argument("expected_error: map and data sizes differ");
  if (!(n_photons > 0)) throw std::invalid_argument("expected_error: n_photons must be positive");
  double l1 = 0, inner = 0;
  for (size_t i = 0; i < y.y.size(); ++i) {
    l1 += y.y.data()[i];
    inner += y.y.data()[i] * s.s.data()[i];
  }
  ErrorReport r;
  r.expected_mse = l1 / n_photons * inner;
  if (specimen_norm_sq && *specimen_norm_sq > 0) r.expected_rel = r.expected_mse / *specimen_norm_sq;
  return r;
}

WeightMapComparison compare_weight_maps(int n, int m, int stride) {
  WeightMapComparison c;
  const WeightMapEvaluator eb(n, m, ReferenceKind::Block);
  const WeightMapEvaluator ep(n, m, ReferenceKind::Pinhole);
  const WeightMapEvaluator ed(n, m, ReferenceKind::Dual);
  c.block = eb.grid(stride);
  c.pinhole = ep.grid(stride);
  c.dual = ed.grid(stride);
  const int g = c.dual.s.rows();
  c.ratio = RMat(g, g);
  std::vector<double> r;
  r.reserve(size_t(g) * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double best_single = std::min(c.block.s(i, j), c.pinhole.s(i, j));
      c.ratio(i, j) = c.dual.s(i, j) / best_single;
      r.push_back(c.ratio(i, j));
    }
  std::sort(r.begin(), r.end());
  c.median_ratio = (g * g) % 2 ? r[r.size() / 2] : 0.5 * (r[r.size() / 2 - 1] + r[r.size() / 2]);
  auto borders = [m](const WeightMapEvaluator& e) {
    std::vector<double> b;
    b.reserve(4 * size_t(m));
    for (int k = 0; k < m; ++k) b.push_back(e.eval(0, k));      // top row
    for (int k = 0; k < m; ++k) b.push_back(e.eval(m - 1, k));  // bottom row
    for (int k = 0; k < m; ++k) b.push_back(e.eval(k, 0));      // left column
    for (int k = 0; k < m; ++k) b.push_back(e.eval(k, m - 1));  // right column
    return b;
  };
  c.border_block = borders(eb);
  c.border_pinhole = borders(ep);
  c.border_dual = borders(ed);
  return c;
}

}  // namespace holo
