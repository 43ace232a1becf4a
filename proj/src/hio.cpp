#include "holodeconv/hio.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holodeconv/fft.hpp"
#include "holodeconv/noise_model.hpp"

namespace holo {

ObjectConstraints constraints_for(ReferenceKind kind, int n, int m) {
  if (n < 1) throw std::invalid_argument("constraints_for: n must be >= 1");
  if (m < 4 * n - 1) throw std::invalid_argument("constraints_for: need m >= 4n - 1");
  ObjectConstraints oc;
  oc.m = m;
  oc.support = Mat<uint8_t>(m, m);
  oc.known_mask = Mat<uint8_t>(m, m);
  oc.known_values = CMat(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) oc.support(i, j) = 1;
  if (kind == ReferenceKind::None) return oc;
  if (kind != ReferenceKind::Block && kind != ReferenceKind::Pinhole)
    throw std::invalid_argument("constraints_for: kind must be None, Block, or Pinhole");
  for (int i = 0; i < n; ++i)
    for (int j = n; j < 2 * n; ++j) {
      oc.support(i, j) = 1;
      oc.known_mask(i, j) = 1;
    }
  if (kind == ReferenceKind::Block) {
    for (int i = 0; i < n; ++i)
      for (int j = n; j < 2 * n; ++j) oc.known_values(i, j) = 1.0;
  } else {
    oc.known_values(n - 1, 2 * n - 1) = 1.0;
  }
  return oc;
}

CMat magnitude_project(const CMat& freq, const RMat& magnitudes) {
  if (freq.rows() != magnitudes.rows() || freq.cols() != magnitudes.cols())
    throw std::invalid_argument("magnitude_project: shape mismatch");
  CMat out(freq.rows(), freq.cols());
  for (size_t i = 0; i < freq.size(); ++i) {
    const cxd f = freq.data()[i];
    const double mag = magnitudes.data()[i];
    const double a = std::abs(f);
    out.data()[i] = a > 0 ? f * (mag / a) : cxd(mag, 0.0);
  }
  return out;
}

RecoveryResult recover_hio(const DiffractionData& d, int n, ReferenceKind kind,
                           const HioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = d.m;
  if (d.y.rows() != m || d.y.cols() != m)
    throw std::invalid_argument("recover_hio: data shape mismatch");
  if (cfg.n_restarts < 1 || cfg.n_iters < 0 || cfg.er_iters < 0)
    throw std::invalid_argument("recover_hio: bad iteration counts");
  const ObjectConstraints oc = constraints_for(kind, n, m);
  const size_t mm = size_t(m) * m;
  std::vector<std::pair<size_t, cxd>> known_px;
  for (size_t i = 0; i < mm; ++i)
    if (oc.known_mask.data()[i]) known_px.emplace_back(i, oc.known_values.data()[i]);

  int clamped = 0;
  RMat mag(m, m);
  double mag_norm_sq = 0;
  for (size_t i = 0; i < mm; ++i) {
    double v = d.y.data()[i];
    if (v < 0) {
      ++clamped;
      v = 0;
    }
    mag.data()[i] = std::sqrt(v);
    mag_norm_sq += v;
  }
  const double mag_norm = std::sqrt(mag_norm_sq);

  CMat best(m, m);
  double best_res = -1;
  const double inv_mm = 1.0 / double(mm);

  FftBuf g(mm), spec(mm), gp(mm);
  CMat observed(m, m);
  for (int restart = 0; restart < cfg.n_restarts; ++restart) {
    // Start from the measured moduli with random phases (or a caller-given
    // object for the first restart).
    if (restart == 0 && cfg.init) {
      if (cfg.init->rows() != m || cfg.init->cols() != m)
        throw std::invalid_argument("recover_hio: init must be m x m");
      for (size_t i = 0; i < mm; ++i) g[i] = cfg.init->data()[i];
    } else {
      RandomStream rng(cfg.seed, uint32_t(restart), 0u, /*tag=*/1u);
      for (size_t i = 0; i < mm; ++i)
        spec[i] = std::polar(mag.data()[i], 2.0 * std::numbers::pi * rng.next_double());
      ifft2(m, spec.data(), g.data());
      for (size_t i = 0; i < mm; ++i) g[i] *= inv_mm;
    }

    const int total = cfg.n_iters + cfg.er_iters;
    for (int it = 0; it < total; ++it) {
      fft2(m, g.data(), spec.data());
      for (size_t i = 0; i < mm; ++i) {
        const cxd f = spec[i];
        const double a = std::abs(f);
        const double target = mag.data()[i];
        spec[i] = a > 0 ? f * (target / a) : cxd(target, 0.0);
      }
      ifft2(m, spec.data(), gp.data());
      const bool er = it >= cfg.n_iters;
      for (size_t i = 0; i < mm; ++i) {
        const cxd cand = gp[i] * inv_mm;
        if (oc.support.data()[i])
          g[i] = cand;
        else
          g[i] = er ? cxd(0.0) : g[i] - cfg.beta * cand;
      }
      for (const auto& [idx, val] : known_px) g[idx] = val;
      if (cfg.observer) {
        for (size_t i = 0; i < mm; ++i) observed.data()[i] = g[i];
        cfg.observer(it, observed);
      }
    }

    fft2(m, g.data(), spec.data());
    double acc = 0;
    for (size_t i = 0; i < mm; ++i) {
      const double diff = std::abs(spec[i]) - mag.data()[i];
      acc += diff * diff;
    }
    const double res = mag_norm > 0 ? std::sqrt(acc) / mag_norm : std::sqrt(acc);
    if (best_res < 0 || res < best_res) {
      best_res = res;
      for (size_t i = 0; i < mm; ++i) best.data()[i] = g[i];
    }
  }

  RecoveryResult out;
  out.x_hat = CMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.x_hat(i, j) = best(i, j);
  out.method = kind == ReferenceKind::None    ? Method::HioPlain
               : kind == ReferenceKind::Block ? Method::HioBlock
                                              : Method::HioPinhole;
  out.fourier_residual = best_res;
  out.clamped_negatives = clamped;
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double registered_relative_error(const CMat& x, const CMat& x_hat, bool align) {
  const int n = x.rows();
  if (x.cols() != n || x_hat.rows() != n || x_hat.cols() != n)
    throw std::invalid_argument("registered_relative_error: need matching square images");
  const double xn = frob_norm_sq(x);
  if (xn == 0) throw std::invalid_argument("registered_relative_error: reference image is zero");
  if (!align) {
    double acc = 0;
    for (size_t i = 0; i < x.size(); ++i) acc += std::norm(x.data()[i] - x_hat.data()[i]);
    return acc / xn;
  }
  // Search the trivial ambiguities: conjugate flip, integer shifts, and the
  // optimal global phase for each shift.
  double best = -1;
  for (int flip = 0; flip < 2; ++flip) {
    CMat c(n, n);
    if (!flip)
      c = x_hat;
    else
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::conj(x_hat(n - 1 - i, n - 1 - j));
    for (int d1 = -(n - 1); d1 <= n - 1; ++d1) {
      const int i_lo = std::max(0, d1), i_hi = std::min(n - 1, n - 1 + d1);
      for (int d2 = -(n - 1); d2 <= n - 1; ++d2) {
        const int j_lo = std::max(0, d2), j_hi = std::min(n - 1, n - 1 + d2);
        cxd rho = 0;
        double cn = 0;
        for (int i = i_lo; i <= i_hi; ++i)
          for (int j = j_lo; j <= j_hi; ++j) {
            const cxd v = c(i - d1, j - d2);
            rho += x(i, j) * std::conj(v);
            cn += std::norm(v);
          }
        const double err = (xn + cn - 2.0 * std::abs(rho)) / xn;
        if (best < 0 || err < best) best = err;
      }
    }
  }
  return std::max(0.0, best);
}

}  // namespace holo
