#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "holodeconv/forward_model.hpp"
#include "holodeconv/recovery.hpp"

namespace holo {

/// Iterative phase-retrieval baseline: hybrid input-output with a final
/// error-reduction polish, multiple random restarts, and optional enforcement
/// of known reference pixels.
struct HioConfig {
  double beta = 0.9;
  int n_iters = 2000;   ///< hybrid input-output iterations per restart
  int er_iters = 50;    ///< error-reduction iterations appended per restart
  int n_restarts = 5;
  uint64_t seed = 0;
  std::optional<CMat> init;  ///< optional m x m object-domain start (restart 0)
  /// Test hook invoked after every object update with (iteration, object).
  std::function<void(int, const CMat&)> observer;
};

/// Object-domain constraints for one composite kind on an m x m canvas:
/// support mask of the composite, plus the mask/values of reference pixels
/// that are known exactly and re-imposed every iteration.
struct ObjectConstraints {
  int m = 0;
  Mat<uint8_t> support;
  Mat<uint8_t> known_mask;
  CMat known_values;
};

/// kind None -> bare n x n support, nothing known; Block/Pinhole -> n x 2n
/// support with the reference half known. Dual is not offered here; the
/// linear solver covers it.
ObjectConstraints constraints_for(ReferenceKind kind, int n, int m);

/// Replace each modulus by the measured one, keeping phases; zero-modulus
/// entries take the measured modulus with phase 1. Idempotent.
CMat magnitude_project(const CMat& freq, const RMat& magnitudes);

/// Run restarts of HIO + ER against sqrt of the (clamped) intensities and
/// return the specimen quadrant of the restart with the smallest relative
/// Fourier-magnitude residual. Deterministic given (cfg.seed, cfg).
RecoveryResult recover_hio(const DiffractionData& d, int n, ReferenceKind kind,
                           const HioConfig& cfg);

/// Relative squared error ||x - x_hat||_F^2 / ||x||_F^2. With `align` set,
/// minimizes over the trivial ambiguities of reference-free retrieval first:
/// global phase, integer shifts, and the conjugate flip.
double registered_relative_error(const CMat& x, const CMat& x_hat, bool align);

}  // namespace holo
