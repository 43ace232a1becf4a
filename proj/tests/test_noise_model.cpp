#include "holodeconv/noise_model.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using holo::DiffractionData;
using holo::PoissonConfig;
using holo::RandomStream;
using holo::RMat;

TEST(Philox, MatchesReferenceVectors) {
  // Known-answer vectors for the 10-round 4x32 configuration.
  const auto z = holo::philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
  EXPECT_EQ(z[0], 0x6627e8d5u);
  EXPECT_EQ(z[1], 0xe169c58du);
  EXPECT_EQ(z[2], 0xbc57ac4cu);
  EXPECT_EQ(z[3], 0x9b00dbd8u);
  const auto f = holo::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(f[0], 0x408f276du);
  EXPECT_EQ(f[1], 0x41c83b0eu);
  EXPECT_EQ(f[2], 0xa20bc7c6u);
  EXPECT_EQ(f[3], 0x6d5451fdu);
  const auto p = holo::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(p[0], 0xd16cfe09u);
  EXPECT_EQ(p[1], 0x94fdccebu);
  EXPECT_EQ(p[2], 0x5001e420u);
  EXPECT_EQ(p[3], 0x24126ea1u);
}

TEST(RandomStream, DeterministicAndKeySensitive) {
  RandomStream a(42, 1, 2), b(42, 1, 2), c(42, 1, 3), d(43, 1, 2);
  bool all_eq = true, c_differs = false, d_differs = false;
  for (int i = 0; i < 16; ++i) {
    const double va = a.next_double();
    all_eq = all_eq && va == b.next_double();
    c_differs = c_differs || va != c.next_double();
    d_differs = d_differs || va != d.next_double();
  }
  EXPECT_TRUE(all_eq);
  EXPECT_TRUE(c_differs);
  EXPECT_TRUE(d_differs);
}

TEST(RandomStream, UniformsCoverUnitInterval) {
  RandomStream rng(7, 0, 0);
  double lo = 1, hi = 0, mean = 0;
  const int k = 20000;
  for (int i = 0; i < k; ++i) {
    const double u = rng.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u;
  }
  mean /= k;
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
  EXPECT_NEAR(mean, 0.5, 4.0 / std::sqrt(12.0 * k));
}

TEST(PoissonSample, MomentsInBothRegimes) {
  for (const double lambda : {0.7, 3.0, 40.0, 400.0}) {
    RandomStream rng(11, uint32_t(lambda * 100), 0);
    const int k = 20000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < k; ++i) {
      const auto v = double(holo::poisson_sample(lambda, rng));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / k;
    const double var = (sumsq - k * mean * mean) / (k - 1.0);
    EXPECT_NEAR(mean, lambda, 4.0 * std::sqrt(lambda / k)) << "lambda=" << lambda;
    EXPECT_NEAR(var / lambda, 1.0, 0.10) << "lambda=" << lambda;
  }
}

TEST(PoissonSample, EdgeCases) {
  RandomStream rng(1, 0, 0);
  EXPECT_EQ(holo::poisson_sample(0.0, rng), 0);
  EXPECT_THROW(holo::poisson_sample(-1.0, rng), std::invalid_argument);
}

DiffractionData small_data() {
  DiffractionData d;
  d.m = 3;
  d.y = RMat(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d.y(i, j) = 1.0 + 2.0 * i + j;
  return d;
}

TEST(Corrupt, ZeroDataStaysZero) {
  DiffractionData d;
  d.m = 2;
  d.y = RMat(2, 2);
  const auto out = holo::corrupt(d, PoissonConfig{100.0, 5});
  for (size_t i = 0; i < out.y.size(); ++i) EXPECT_EQ(out.y.data()[i], 0.0);
}

TEST(Corrupt, DeterministicGivenSeed) {
  const auto d = small_data();
  const auto a = holo::corrupt(d, PoissonConfig{500.0, 9});
  const auto b = holo::corrupt(d, PoissonConfig{500.0, 9});
  const auto c = holo::corrupt(d, PoissonConfig{500.0, 10});
  EXPECT_EQ(holo::max_abs_diff(a.y, b.y), 0.0);
  EXPECT_GT(holo::max_abs_diff(a.y, c.y), 0.0);
}

TEST(Corrupt, PreservesMeanAndScalesVariance) {
  auto d = small_data();
  double l1 = 0;
  for (size_t i = 0; i < d.y.size(); ++i) l1 += d.y.data()[i];
  const double n_photons = 4.0 * l1;  // scale factor 1/4: rates 4*y, values y/4 per photon
  const int draws = 4000;
  RMat sum(3, 3), sumsq(3, 3);
  for (int t = 0; t < draws; ++t) {
    const auto out = holo::corrupt(d, PoissonConfig{n_photons, 1000 + uint64_t(t)});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        sum(i, j) += out.y(i, j);
        sumsq(i, j) += out.y(i, j) * out.y(i, j);
      }
  }
  const double scale = l1 / n_photons;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double mean = sum(i, j) / draws;
      const double var = (sumsq(i, j) - draws * mean * mean) / (draws - 1.0);
      const double want_var = scale * d.y(i, j);
      EXPECT_NEAR(mean, d.y(i, j), 4.0 * std::sqrt(want_var / draws)) << i << "," << j;
      EXPECT_NEAR(var / want_var, 1.0, 0.15) << i << "," << j;
    }
}

TEST(Corrupt, RejectsBadInputs) {
  auto d = small_data();
  EXPECT_THROW(holo::corrupt(d, PoissonConfig{0.0, 1}), std::invalid_argument);
  d.y(1, 1) = -1.0;
  EXPECT_THROW(holo::corrupt(d, PoissonConfig{100.0, 1}), std::invalid_argument);
}

TEST(DeriveSeed, StableAndDistinct) {
  const uint64_t a = holo::derive_seed(1, "img", "dual", 0);
  EXPECT_EQ(a, holo::derive_seed(1, "img", "dual", 0));
  EXPECT_NE(a, holo::derive_seed(1, "img", "dual", 1));
  EXPECT_NE(a, holo::derive_seed(1, "img", "block", 0));
  EXPECT_NE(a, holo::derive_seed(1, "other", "dual", 0));
  EXPECT_NE(a, holo::derive_seed(2, "img", "dual", 0));
}

}  // namespace
