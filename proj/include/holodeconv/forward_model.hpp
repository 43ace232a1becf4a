#pragma once

#include "holodeconv/mat.hpp"

namespace holo {

/// Reference layout placed next to the specimen before diffraction.
///  - Block:   [X, 1] with an n x n all-ones block to the right.
///  - Pinhole: [X, E] with a single unit pixel in the far corner.
///  - Dual:    2n x 2n arrangement carrying both references at once:
///             top-left X, top-right all-ones block, and a unit pixel at the
///             bottom-left corner nearest the center.
///  - None:    the bare specimen (used by the plain HIO baseline).
enum class ReferenceKind { Block, Pinhole, Dual, None };

const char* to_string(ReferenceKind k);

/// n x n complex specimen with entries bounded by 1 in modulus.
struct SpecimenImage {
  int n = 0;
  CMat values;
};

/// Validates the modulus bound (|x| <= 1 within a small slack) and wraps the
/// image. Throws std::invalid_argument otherwise.
SpecimenImage make_specimen(CMat values);

/// Specimen-plus-reference arrangement; `values` is n x 2n for single
/// references, 2n x 2n for the dual layout, n x n for None.
struct Composite {
  ReferenceKind kind = ReferenceKind::None;
  int n = 0;
  CMat values;
};

Composite make_composite(const SpecimenImage& x, ReferenceKind kind);

/// Oversampled squared-modulus diffraction pattern, m x m with m >= 4n - 1.
struct DiffractionData {
  int m = 0;
  RMat y;
};

/// Zero-pad the composite into the top-left of an m x m canvas, transform,
/// and record squared moduli. Requires m >= 4n - 1.
DiffractionData diffract(const Composite& c, int m);

/// Spatial cross-correlation lags recovered from intensities alone:
/// lags(i, j) holds lag (i - (2n-1), j - (2n-1)), a (4n-1) x (4n-1) window.
struct Autocorrelation {
  int n = 0;
  CMat lags;
};

/// Invert the measured intensities to correlation lags: inverse transform,
/// divide by m^2, and read the centered (4n-1)^2 window with wrap-around.
Autocorrelation autocorrelation_from_data(const DiffractionData& d, int n);

/// The two n x n windows of the lag array that the linear recovery consumes:
///  - cb: rows n..2n-1, cols 0..n-1  (block-reference window; equals
///        L X L^T for noiseless dual data, with L the lower-ones matrix)
///  - cp: rows 0..n-1, cols n..2n-1  (pinhole window; equals X exactly
///        for noiseless dual data)
/// Single-reference composites place their specimen-reference term in the cb
/// window; cp is still extracted and simply unused there.
struct CrossCorrelations {
  CMat cb;
  CMat cp;
};

CrossCorrelations extract_cross_correlations(const Autocorrelation& a);

/// Fresnel-geometry guidance: pixel pitch delta, wavelength lambda, detector
/// distance z, and field half-width B satisfy the sampling requirement iff
/// delta * 2B <= lambda * z. Throws std::invalid_argument on nonpositive
/// arguments. Advisory only; no simulation path depends on it.
bool check_sampling_condition(double delta, double lambda, double z, double B);

}  // namespace holo
