#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holodeconv/error_analysis.hpp"
#include "holodeconv/forward_model.hpp"
#include "holodeconv/hio.hpp"

namespace holo {

/// Load a grayscale image (PGM P2/P5 with maxval <= 255, or a CSV numeric
/// grid with entries in [0, 1]) and box-average it to n x n. Bad formats and
/// out-of-range values raise std::invalid_argument.
SpecimenImage ingest_image(const std::string& path, int n);

/// Deterministic synthetic specimen: a smooth arrangement of Gaussian blobs
/// with values in [0, 1], keyed by `id`. Spectral mass concentrates at low
/// frequencies, as natural images do.
SpecimenImage make_phantom(int n, uint64_t id);

/// One experiment: a set of images crossed with a set of recovery methods,
/// each run over noisy trials at a fixed photon budget.
struct ExperimentConfig {
  std::vector<std::string> images;  ///< paths, or "phantom:<id>" specs
  int n = 64;
  int m = 1024;
  double photons_per_pixel = 1000;  ///< total budget = photons_per_pixel * m^2
  std::vector<std::string> methods{"dual", "block", "pinhole"};
  int n_trials = 100;
  uint64_t seed = 0;
  bool noiseless = false;   ///< skip the noise model (single exact trial each)
  std::string output_dir;   ///< empty = no files written
  bool emit_maps = false;   ///< also write weight-map artifacts
  int map_stride = 8;
  // Iterative-baseline knobs (apply to the hio_* methods only).
  double hio_beta = 0.9;
  int hio_iters = 2000;
  int hio_er_iters = 50;
  int hio_restarts = 5;
};

struct ResultRow {
  std::string image;
  std::string method;
  double empirical_rel_err = 0;            // mean of per-trial squared errors
  std::optional<double> expected_rel_err;  // closed form; absent for hio_*
  double std_err = 0;
  int trials = 0;
  double wall_time_s = 0;
  bool ok = true;
  std::string message;  // failure description when !ok
};

/// Run every (image, method) cell: simulate, corrupt per trial with a seed
/// derived from (seed, image, method, trial), recover, and aggregate errors.
/// Writes results.csv and manifest.json into output_dir when set. Rows that
/// fail carry ok = false rather than aborting the rest.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Serialize rows in the stable CSV schema
/// image,method,empirical_rel_err,expected_rel_err,stderr,trials,wall_time_s.
std::string results_to_csv(const std::vector<ResultRow>& rows);

/// Weight-map artifact bundle: per-kind CSV grids (subsampled by stride),
/// log-scaled 16-bit PGM heatmaps, the advantage-ratio grid, and full-
/// resolution border cross-sections.
void emit_weight_maps(int n, int m, int stride, const std::string& out_dir);

// Small-file IO helpers shared by the CLI.
RMat read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const RMat& a);
void write_csv_matrix(const std::string& path, const CMat& a, bool imag_part);
void write_pgm16_log(const std::string& path, const RMat& a);

}  // namespace holo
