#pragma once

#include <string>
#include <utility>
#include <vector>

#include "holodeconv/forward_model.hpp"

namespace holo {

enum class Method { DualFast, DualNaive, BlockSingle, PinholeSingle, HioPlain, HioBlock, HioPinhole };

const char* to_string(Method m);

struct RecoveryResult {
  CMat x_hat;
  Method method = Method::DualFast;
  double wall_time_s = 0;
  // Diagnostics filled by the iterative baseline; zero for the linear solvers.
  double fourier_residual = 0;
  int clamped_negatives = 0;
};

/// Linear least-squares recovery from dual-reference data via the closed-form
/// factorization of the structured normal equations: O(n^3 + m^2 log m), no
/// dense system is ever formed. Requires m >= 4n - 1.
RecoveryResult recover_dual_fast(const DiffractionData& d, int n);

/// Reference implementation of the same least-squares problem: materializes
/// the stacked system matrix and a dense pseudoinverse. Only for validation;
/// throws std::invalid_argument when n exceeds `cap`.
RecoveryResult recover_dual_naive(const DiffractionData& d, int n, int cap = 8);

/// Recovery from a single-reference composite. Block reference inverts the
/// double cumulative sum by first differences along both axes; pinhole reads
/// the cross-correlation window verbatim. `kind` must be Block or Pinhole.
RecoveryResult recover_single(const DiffractionData& d, int n, ReferenceKind kind);

/// Columns of the end-to-end linear map from measured intensities to the
/// recovered specimen: column for frequency (k1, k2) is the (column-major)
/// vectorized recovery of indicator data e_{k1,k2}. Routed through the
/// explicit small-scale solvers, so it is an independent oracle for the
/// closed-form error analysis. Requires n <= cap (default 8).
CMat build_t_columns(int n, int m, const std::vector<std::pair<int, int>>& freqs,
                     ReferenceKind kind, int cap = 8);

}  // namespace holo
