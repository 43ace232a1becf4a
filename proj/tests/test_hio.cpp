#include "holodeconv/hio.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holodeconv/noise_model.hpp"

namespace {

using holo::CMat;
using holo::cxd;
using holo::DiffractionData;
using holo::HioConfig;
using holo::ReferenceKind;
using holo::RMat;

CMat random_real_specimen(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  CMat a(n, n);
  for (size_t i = 0; i < a.size(); ++i) a.data()[i] = dist(gen);
  return a;
}

TEST(MagnitudeProject, IdempotentAndAchievesTargets) {
  const int m = 6;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CMat f(m, m);
  RMat mag(m, m);
  for (size_t i = 0; i < f.size(); ++i) {
    f.data()[i] = cxd(dist(gen), dist(gen));
    mag.data()[i] = std::abs(dist(gen));
  }
  f(2, 2) = 0.0;  // zero-modulus entry takes the target with phase 1
  const CMat once = holo::magnitude_project(f, mag);
  const CMat twice = holo::magnitude_project(once, mag);
  EXPECT_LE(holo::max_abs_diff(once, twice), 1e-14);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) EXPECT_NEAR(std::abs(once(i, j)), mag(i, j), 1e-13);
  EXPECT_NEAR(once(2, 2).real(), mag(2, 2), 1e-14);
}

TEST(ConstraintsFor, LayoutsMatchComposites) {
  const int n = 2, m = 8;
  const auto none = holo::constraints_for(ReferenceKind::None, n, m);
  int support_count = 0;
  for (size_t i = 0; i < none.support.size(); ++i) support_count += none.support.data()[i];
  EXPECT_EQ(support_count, n * n);
  const auto block = holo::constraints_for(ReferenceKind::Block, n, m);
  for (int i = 0; i < n; ++i)
    for (int j = n; j < 2 * n; ++j) {
      EXPECT_EQ(block.known_mask(i, j), 1);
      EXPECT_EQ(block.known_values(i, j), cxd(1.0, 0.0));
    }
  const auto pin = holo::constraints_for(ReferenceKind::Pinhole, n, m);
  EXPECT_EQ(pin.known_values(n - 1, 2 * n - 1), cxd(1.0, 0.0));
  EXPECT_EQ(pin.known_values(0, n), cxd(0.0, 0.0));
  EXPECT_EQ(pin.known_mask(0, n), 1);
  EXPECT_THROW(holo::constraints_for(ReferenceKind::Dual, n, m), std::invalid_argument);
}

TEST(RecoverHio, TrueCompositeIsAFixedPoint) {
  const int n = 4, m = 16;
  const auto x = holo::make_specimen(random_real_specimen(n, 11));
  const auto comp = holo::make_composite(x, ReferenceKind::Block);
  const auto d = holo::diffract(comp, m);
  CMat init(m, m);
  for (int i = 0; i < comp.values.rows(); ++i)
    for (int j = 0; j < comp.values.cols(); ++j) init(i, j) = comp.values(i, j);
  HioConfig cfg;
  cfg.n_iters = 30;
  cfg.er_iters = 5;
  cfg.n_restarts = 1;
  cfg.init = init;
  double worst_drift = 0;
  cfg.observer = [&](int, const CMat& g) {
    double drift = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const cxd want = (i < comp.values.rows() && j < comp.values.cols())
                             ? comp.values(i, j)
                             : cxd(0.0, 0.0);
        drift = std::max(drift, std::abs(g(i, j) - want));
      }
    worst_drift = std::max(worst_drift, drift);
  };
  const auto res = holo::recover_hio(d, n, ReferenceKind::Block, cfg);
  EXPECT_LE(worst_drift, 1e-8);
  EXPECT_LE(holo::rel_frob_diff(x.values, res.x_hat), 1e-8);
  EXPECT_LE(res.fourier_residual, 1e-8);
}

TEST(RecoverHio, ZeroDataGivesZeroEstimate) {
  DiffractionData d;
  d.m = 8;
  d.y = RMat(8, 8);
  HioConfig cfg;
  cfg.n_iters = 10;
  cfg.er_iters = 2;
  cfg.n_restarts = 2;
  const auto res = holo::recover_hio(d, 2, ReferenceKind::None, cfg);
  EXPECT_LE(holo::frob_norm(res.x_hat), 1e-14);
}

TEST(RecoverHio, DeterministicGivenSeed) {
  const int n = 3, m = 12;
  const auto x = holo::make_specimen(random_real_specimen(n, 21));
  auto d = holo::diffract(holo::make_composite(x, ReferenceKind::Pinhole), m);
  d = holo::corrupt(d, holo::PoissonConfig{1e5, 9});
  HioConfig cfg;
  cfg.n_iters = 40;
  cfg.er_iters = 5;
  cfg.n_restarts = 2;
  cfg.seed = 1234;
  const auto a = holo::recover_hio(d, n, ReferenceKind::Pinhole, cfg);
  const auto b = holo::recover_hio(d, n, ReferenceKind::Pinhole, cfg);
  EXPECT_EQ(holo::max_abs_diff(a.x_hat, b.x_hat), 0.0);
  cfg.seed = 1235;
  const auto c = holo::recover_hio(d, n, ReferenceKind::Pinhole, cfg);
  EXPECT_GT(holo::max_abs_diff(a.x_hat, c.x_hat), 0.0);
}

TEST(RecoverHio, KnownReferenceRegionHeldEveryIteration) {
  const int n = 3, m = 12;
  const auto x = holo::make_specimen(random_real_specimen(n, 31));
  const auto d = holo::diffract(holo::make_composite(x, ReferenceKind::Block), m);
  HioConfig cfg;
  cfg.n_iters = 15;
  cfg.er_iters = 5;
  cfg.n_restarts = 1;
  bool held = true;
  cfg.observer = [&](int, const CMat& g) {
    for (int i = 0; i < n; ++i)
      for (int j = n; j < 2 * n; ++j)
        if (std::abs(g(i, j) - cxd(1.0, 0.0)) > 0) held = false;
  };
  holo::recover_hio(d, n, ReferenceKind::Block, cfg);
  EXPECT_TRUE(held);
}

TEST(RecoverHio, ClampsNegativeIntensities) {
  DiffractionData d;
  d.m = 8;
  d.y = RMat(8, 8, 0.5);
  d.y(1, 1) = -0.125;
  d.y(2, 3) = -4.0;
  HioConfig cfg;
  cfg.n_iters = 5;
  cfg.er_iters = 1;
  cfg.n_restarts = 1;
  const auto res = holo::recover_hio(d, 2, ReferenceKind::None, cfg);
  EXPECT_EQ(res.clamped_negatives, 2);
  for (size_t i = 0; i < res.x_hat.size(); ++i)
    EXPECT_TRUE(std::isfinite(res.x_hat.data()[i].real()));
}

TEST(RecoverHio, ConvergesWithKnownReferenceOnNoiselessData) {
  const int n = 6, m = 32;
  const auto x = holo::make_specimen(random_real_specimen(n, 41));
  const auto d = holo::diffract(holo::make_composite(x, ReferenceKind::Block), m);
  HioConfig cfg;
  cfg.n_iters = 300;
  cfg.er_iters = 50;
  cfg.n_restarts = 3;
  cfg.seed = 7;
  const auto res = holo::recover_hio(d, n, ReferenceKind::Block, cfg);
  EXPECT_LE(holo::rel_frob_diff(x.values, res.x_hat), 0.05);
}

TEST(RegisteredError, HandlesTrivialAmbiguities) {
  const int n = 8;
  // Specimen supported away from the frame border so shifts stay in frame.
  CMat x(n, n);
  std::mt19937 gen(51);
  std::uniform_real_distribution<double> dist(0.2, 1.0);
  for (int i = 2; i < 6; ++i)
    for (int j = 2; j < 6; ++j) x(i, j) = cxd(dist(gen), dist(gen));
  // Exact copy.
  EXPECT_NEAR(holo::registered_relative_error(x, x, true), 0.0, 1e-12);
  // Global phase.
  CMat xp(n, n);
  for (size_t i = 0; i < x.size(); ++i) xp.data()[i] = x.data()[i] * std::polar(1.0, 1.1);
  EXPECT_NEAR(holo::registered_relative_error(x, xp, true), 0.0, 1e-12);
  EXPECT_GT(holo::registered_relative_error(x, xp, false), 0.1);
  // Integer shift.
  CMat xs(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int a = i - 1, b = j + 2;
      if (a >= 0 && a < n && b >= 0 && b < n) xs(i, j) = x(a, b);
    }
  EXPECT_NEAR(holo::registered_relative_error(x, xs, true), 0.0, 1e-12);
  // Conjugate flip.
  CMat xf(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xf(i, j) = std::conj(x(n - 1 - i, n - 1 - j));
  EXPECT_NEAR(holo::registered_relative_error(x, xf, true), 0.0, 1e-12);
  // Plain (unaligned) error is the straight relative difference.
  const double plain = holo::registered_relative_error(x, xs, false);
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += std::norm(x.data()[i] - xs.data()[i]);
    den += std::norm(x.data()[i]);
  }
  EXPECT_NEAR(plain, num / den, 1e-12);
}

}  // namespace
