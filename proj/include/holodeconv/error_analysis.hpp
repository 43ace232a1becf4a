#pragma once

#include <optional>
#include <vector>

#include "holodeconv/forward_model.hpp"

namespace holo {

/// Frequency weight map S: S(k1, k2) is the squared column norm of the linear
/// intensity-to-specimen map at frequency (k1, k2). `s` holds the map on the
/// subsampled grid k = index * stride (stride 1 = full m x m map).
struct WeightMap {
  int n = 0;
  int m = 0;
  int stride = 1;
  ReferenceKind kind = ReferenceKind::Dual;
  RMat s;
};

/// Evaluates S(k1, k2) in O(n) per entry after an O(n^2 m) factor
/// precomputation, for any reference kind.
class WeightMapEvaluator {
 public:
  WeightMapEvaluator(int n, int m, ReferenceKind kind);
  double eval(int k1, int k2) const;
  WeightMap grid(int stride = 1) const;
  int n() const { return n_; }
  int m() const { return m_; }
  ReferenceKind kind() const { return kind_; }

 private:
  int n_, m_;
  ReferenceKind kind_;
  // Dual factors: per-frequency column data so eval is an O(n) dot product.
  RMat pa1_, pa2_, m1_, m2_;  // n x m real
  CMat z_, m3_;               // n x m complex
  // Single-reference factors: separable column norms.
  std::vector<double> c1_, c2_;
};

/// Closed-form weight map (no dense operator is formed).
WeightMap weight_map_closed_form(int n, int m, ReferenceKind kind, int stride = 1);

/// Oracle: materialize the recovery operator column by column through the
/// explicit small-scale solvers and take squared column norms. Only for small
/// n (cap 8) and full stride.
WeightMap weight_map_direct(int n, int m, ReferenceKind kind);

struct ErrorReport {
  double expected_mse = 0;                 // E || X_hat - X ||_F^2
  std::optional<double> expected_rel;      // divided by ||X||_F^2 when known
};

/// Closed-form expected squared recovery error under the shot-noise model:
/// (||y||_1 / n_photons) * <S, y> with y the noiseless intensities.
/// Requires a stride-1 map matching the data size.
ErrorReport expected_error(const WeightMap& s, const DiffractionData& y, double n_photons,
                           std::optional<double> specimen_norm_sq = std::nullopt);

/// Side-by-side map comparison used for figures and the experiment harness:
/// strided grids for all three reference kinds, the pointwise advantage ratio
/// dual / min(block, pinhole), its median, and full-resolution border
/// cross-sections (4m values per kind, ordered top row, bottom row, left
/// column, right column).
struct WeightMapComparison {
  WeightMap block, pinhole, dual;
  RMat ratio;
  double median_ratio = 0;
  std::vector<double> border_block, border_pinhole, border_dual;
};

WeightMapComparison compare_weight_maps(int n, int m, int stride = 1);

}  // namespace holo
