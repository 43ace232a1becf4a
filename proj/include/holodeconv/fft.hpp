#pragma once

#include <cstddef>

#include "holodeconv/mat.hpp"

namespace holo {

/// Zero-initialized complex buffer with the alignment the FFT backend wants.
/// All arrays passed to fft2/ifft2 must live in FftBuf storage.
class FftBuf {
 public:
  explicit FftBuf(size_t count);
  ~FftBuf();
  FftBuf(const FftBuf&) = delete;
  FftBuf& operator=(const FftBuf&) = delete;
  FftBuf(FftBuf&& o) noexcept : p_(o.p_), n_(o.n_) { o.p_ = nullptr; o.n_ = 0; }

  cxd* data() { return p_; }
  const cxd* data() const { return p_; }
  size_t size() const { return n_; }
  cxd& operator[](size_t i) { return p_[i]; }
  const cxd& operator[](size_t i) const { return p_[i]; }
  void zero();

 private:
  cxd* p_ = nullptr;
  size_t n_ = 0;
};

/// 2-D complex-to-complex DFT of a row-major m x m array,
/// out(k) = sum_t in(t) exp(-2 pi i <k,t> / m). Unnormalized.
/// in and out must be distinct FftBuf storage of size m*m.
void fft2(int m, const cxd* in, cxd* out);

/// Inverse-kernel transform, out(t) = sum_k in(k) exp(+2 pi i <k,t> / m).
/// Unnormalized: ifft2(fft2(x)) = m^2 x.
void ifft2(int m, const cxd* in, cxd* out);

}  // namespace holo
