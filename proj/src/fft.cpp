#include "holodeconv/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace holo {

FftBuf::FftBuf(size_t count) : n_(count) {
  p_ = static_cast<cxd*>(fftw_malloc(sizeof(cxd) * count));
  if (!p_) throw std::bad_alloc();
  std::memset(p_, 0, sizeof(cxd) * count);
}

FftBuf::~FftBuf() {
  if (p_) fftw_free(p_);
}

void FftBuf::zero() { std::memset(p_, 0, sizeof(cxd) * n_); }

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  // Planning scratch stays alive for the lifetime of the cache entry so the
  // plans remain valid for new-array execution.
  fftw_complex* a = nullptr;
  fftw_complex* b = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

// FFTW_ESTIMATE picks plans from a machine-state-independent heuristic, so
// repeated runs transform with identical floating-point behavior; timing-based
// planning would not guarantee that.
const PlanPair& plans_for(int m) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  PlanPair p;
  p.a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_t(m) * m));
  p.b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_t(m) * m));
  if (!p.a || !p.b) throw std::bad_alloc();
  p.fwd = fftw_plan_dft_2d(m, m, p.a, p.b, FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_2d(m, m, p.a, p.b, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fft: planner failed");
  return cache.emplace(m, p).first->second;
}

fftw_complex* fc(const cxd* z) {
  return reinterpret_cast<fftw_complex*>(const_cast<cxd*>(z));
}

}  // namespace

void fft2(int m, const cxd* in, cxd* out) {
  if (m < 1) throw std::invalid_argument("fft2: m must be >= 1");
  if (in == out) throw std::invalid_argument("fft2: in-place transform not supported");
  const PlanPair& p = plans_for(m);
  fftw_execute_dft(p.fwd, fc(in), fc(out));
}

void ifft2(int m, const cxd* in, cxd* out) {
  if (m < 1) throw std::invalid_argument("ifft2: m must be >= 1");
  if (in == out) throw std::invalid_argument("ifft2: in-place transform not supported");
  const PlanPair& p = plans_for(m);
  fftw_execute_dft(p.bwd, fc(in), fc(out));
}

}  // namespace holo
