#pragma once

#include <array>
#include <cstdint>

#include "holodeconv/forward_model.hpp"

namespace holo {

/// Philox4x32-10 counter-based block cipher. Stateless: each (counter, key)
/// pair maps to four pseudo-random 32-bit words, so any array entry can draw
/// its own stream independent of traversal order.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

/// Stream of uniforms/integers for one logical consumer, keyed by
/// (seed, id1, id2, tag). Deterministic and independent across keys.
class RandomStream {
 public:
  RandomStream(uint64_t seed, uint32_t id1, uint32_t id2, uint32_t tag = 0);

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();
  uint64_t next_u64();

 private:
  void refill();
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 4> buf_{};
  int have_ = 0;  // unread 32-bit words in buf_
};

/// Draw from Poisson(lambda): exact CDF inversion for small rates, the PTRS
/// transformed-rejection sampler for lambda >= 10. Throws on negative lambda.
int64_t poisson_sample(double lambda, RandomStream& rng);

/// Shot-noise model at a photon budget: with l1 = sum of y, each entry is
/// replaced by (l1 / n_photons) * Poisson(n_photons * y_k / l1), drawn from a
/// stream keyed by (seed, k1, k2). Entrywise means equal y; variances are
/// (l1 / n_photons) * y. All-zero input is returned unchanged.
struct PoissonConfig {
  double n_photons = 0;
  uint64_t seed = 0;
};

DiffractionData corrupt(const DiffractionData& d, const PoissonConfig& cfg);

/// Stable 64-bit hash used to derive per-trial seeds from run metadata.
uint64_t fnv1a64(const void* bytes, size_t len, uint64_t basis = 1469598103934665603ull);
uint64_t derive_seed(uint64_t master, const char* image_id, const char* method, uint64_t trial);

}  // namespace holo
