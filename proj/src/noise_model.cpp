#include "holodeconv/noise_model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace holo {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox_round(const std::array<uint32_t, 4>& c,
                                            const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = uint64_t(kPhiloxM0) * c[0];
  const uint64_t p1 = uint64_t(kPhiloxM1) * c[2];
  const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

RandomStream::RandomStream(uint64_t seed, uint32_t id1, uint32_t id2, uint32_t tag)
    : key_{uint32_t(seed), uint32_t(seed >> 32)}, ctr_{id1, id2, tag, 0} {}

void RandomStream::refill() {
  buf_ = philox4x32(ctr_, key_);
  have_ = 4;
  ++ctr_[3];
  if (ctr_[3] == 0) ++ctr_[2];  // carry; a single stream never wraps in practice
}

uint64_t RandomStream::next_u64() {
  if (have_ < 2) refill();
  const uint32_t a = buf_[4 - have_];
  const uint32_t b = buf_[4 - have_ + 1];
  have_ -= 2;
  return (uint64_t(a) << 32) | b;
}

double RandomStream::next_double() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

int64_t poisson_sample(double lambda, RandomStream& rng) {
  if (lambda < 0 || !std::isfinite(lambda))
    throw std::invalid_argument("poisson_sample: rate must be finite and nonnegative");
  if (lambda == 0) return 0;
  if (lambda < 10.0) {
    // CDF inversion; for lambda < 10 the left tail probability exp(-lambda)
    // stays far from underflow and the loop terminates quickly.
    const double u = rng.next_double();
    double p = std::exp(-lambda);
    double cdf = p;
    int64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= lambda / double(k);
      cdf += p;
    }
    return k;
  }
  // PTRS transformed-rejection sampler (Hormann), valid for lambda >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const int64_t k = int64_t(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        double(k) * log_lambda - lambda - std::lgamma(double(k) + 1.0))
      return k;
  }
}

DiffractionData corrupt(const DiffractionData& d, const PoissonConfig& cfg) {
  const int m = d.m;
  if (d.y.rows() != m || d.y.cols() != m)
    throw std::invalid_argument("corrupt: data shape mismatch");
  if (!(cfg.n_photons > 0)) throw std::invalid_argument("corrupt: n_photons must be positive");
  double l1 = 0;
  for (size_t i = 0; i < d.y.size(); ++i) {
    const double v = d.y.data()[i];
    if (v < 0) throw std::invalid_argument("corrupt: intensities must be nonnegative");
    l1 += v;
  }
  DiffractionData out;
  out.m = m;
  out.y = RMat(m, m);
  if (l1 == 0) return out;
  const double scale = l1 / cfg.n_photons;
  const double rate = cfg.n_photons / l1;
#pragma omp parallel for schedule(static)
  for (int k1 = 0; k1 < m; ++k1) {
    for (int k2 = 0; k2 < m; ++k2) {
      RandomStream rng(cfg.seed, uint32_t(k1), uint32_t(k2));
      out.y(k1, k2) = scale * double(poisson_sample(rate * d.y(k1, k2), rng));
    }
  }
  return out;
}

uint64_t fnv1a64(const void* bytes, size_t len, uint64_t basis) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  uint64_t h = basis;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t derive_seed(uint64_t master, const char* image_id, const char* method, uint64_t trial) {
  uint64_t h = fnv1a64(&master, sizeof(master));
  h = fnv1a64(image_id, std::strlen(image_id), h);
  h = fnv1a64("|", 1, h);
  h = fnv1a64(method, std::strlen(method), h);
  h = fnv1a64(&trial, sizeof(trial), h);
  return h;
}

}  // namespace holo
