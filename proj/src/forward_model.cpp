#include "holodeconv/forward_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "holodeconv/fft.hpp"

namespace holo {

const char* to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Block: return "block";
    case ReferenceKind::Pinhole: return "pinhole";
    case ReferenceKind::Dual: return "dual";
    case ReferenceKind::None: return "none";
  }
  return "?";
}

SpecimenImage make_specimen(CMat values) {
  const int n = values.rows();
  if (n < 1 || values.cols() != n)
    throw std::invalid_argument("make_specimen: image must be square and nonempty");
  constexpr double slack = 1.0 + 1e-12;
  for (size_t i = 0; i < values.size(); ++i)
    if (!(std::abs(values.data()[i]) <= slack))
      throw std::invalid_argument("make_specimen: entries must satisfy |x| <= 1");
  return SpecimenImage{n, std::move(values)};
}

Composite make_composite(const SpecimenImage& x, ReferenceKind kind) {
  const int n = x.n;
  Composite c;
  c.kind = kind;
  c.n = n;
  switch (kind) {
    case ReferenceKind::None:
      c.values = x.values;
      break;
    case ReferenceKind::Block: {
      c.values = CMat(n, 2 * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c.values(i, j) = x.values(i, j);
        for (int j = n; j < 2 * n; ++j) c.values(i, j) = 1.0;
      }
      break;
    }
    case ReferenceKind::Pinhole: {
      c.values = CMat(n, 2 * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.values(i, j) = x.values(i, j);
      c.values(n - 1, 2 * n - 1) = 1.0;
      break;
    }
    case ReferenceKind::Dual: {
      c.values = CMat(2 * n, 2 * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c.values(i, j) = x.values(i, j);
        for (int j = n; j < 2 * n; ++j) c.values(i, j) = 1.0;
      }
      c.values(2 * n - 1, n - 1) = 1.0;
      break;
    }
  }
  return c;
}

DiffractionData diffract(const Composite& c, int m) {
  const int n = c.n;
  if (m < 4 * n - 1)
    throw std::invalid_argument("diffract: need m >= 4n - 1, got m = " + std::to_string(m) +
                                " for n = " + std::to_string(n));
  FftBuf in(size_t(m) * m), out(size_t(m) * m);
  for (int i = 0; i < c.values.rows(); ++i)
    for (int j = 0; j < c.values.cols(); ++j) in[size_t(i) * m + j] = c.values(i, j);
  fft2(m, in.data(), out.data());
  DiffractionData d;
  d.m = m;
  d.y = RMat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d.y(i, j) = std::norm(out[size_t(i) * m + j]);
  return d;
}

Autocorrelation autocorrelation_from_data(const DiffractionData& d, int n) {
  const int m = d.m;
  if (n < 1) throw std::invalid_argument("autocorrelation_from_data: n must be >= 1");
  if (m < 4 * n - 1)
    throw std::invalid_argument("autocorrelation_from_data: need m >= 4n - 1");
  if (d.y.rows() != m || d.y.cols() != m)
    throw std::invalid_argument("autocorrelation_from_data: data shape mismatch");
  FftBuf in(size_t(m) * m), out(size_t(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) in[size_t(i) * m + j] = d.y(i, j);
  ifft2(m, in.data(), out.data());
  const double inv = 1.0 / (double(m) * m);
  const int w = 4 * n - 1;
  const int off = 2 * n - 1;  // lag s sits at window index s + (2n-1)
  Autocorrelation a;
  a.n = n;
  a.lags = CMat(w, w);
  for (int i = 0; i < w; ++i) {
    const int si = ((i - off) % m + m) % m;
    for (int j = 0; j < w; ++j) {
      const int sj = ((j - off) % m + m) % m;
      a.lags(i, j) = out[size_t(si) * m + sj] * inv;
    }
  }
  return a;
}

CrossCorrelations extract_cross_correlations(const Autocorrelation& a) {
  const int n = a.n;
  if (a.lags.rows() != 4 * n - 1 || a.lags.cols() != 4 * n - 1)
    throw std::invalid_argument("extract_cross_correlations: lag window shape mismatch");
  CrossCorrelations c;
  c.cb = CMat(n, n);
  c.cp = CMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c.cb(i, j) = a.lags(n + i, j);
      c.cp(i, j) = a.lags(i, n + j);
    }
  return c;
}

bool check_sampling_condition(double delta, double lambda, double z, double B) {
  if (!(delta > 0) || !(lambda > 0) || !(z > 0) || !(B > 0))
    throw std::invalid_argument("check_sampling_condition: all arguments must be positive");
  return delta * 2.0 * B <= lambda * z;
}

}  // namespace holo
