#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "holodeconv/acceptance.hpp"
#include "holodeconv/error_analysis.hpp"
#include "holodeconv/harness.hpp"
#include "holodeconv/hio.hpp"
#include "holodeconv/noise_model.hpp"
#include "holodeconv/recovery.hpp"

namespace {

namespace fs = std::filesystem;
using namespace holo;

/// The HOLODECONV_SEED environment variable overrides any --seed value.
uint64_t apply_seed_env(uint64_t seed) {
  if (const char* e = std::getenv("HOLODECONV_SEED")) {
    try {
      return std::stoull(e);
    } catch (const std::exception&) {
      throw CLI::ValidationError("HOLODECONV_SEED", "must be an unsigned integer");
    }
  }
  return seed;
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void require_pow2(int m) {
  if (!is_power_of_two(m))
    throw CLI::ValidationError("--m", "must be a power of two (library calls accept any m)");
}

ReferenceKind parse_kind(const std::string& s) {
  if (s == "block") return ReferenceKind::Block;
  if (s == "pinhole") return ReferenceKind::Pinhole;
  if (s == "dual") return ReferenceKind::Dual;
  if (s == "none") return ReferenceKind::None;
  throw CLI::ValidationError("--kind", "must be block, pinhole, dual, or none");
}

SpecimenImage load_specimen(const std::string& image, int n) {
  if (image.rfind("phantom:", 0) == 0) return make_phantom(n, std::stoull(image.substr(8)));
  return ingest_image(image, n);
}

int cmd_simulate(const std::string& image, int n, int m, const std::string& kind_name,
                 double pp, bool noiseless, uint64_t seed, const std::string& out_dir) {
  require_pow2(m);
  seed = apply_seed_env(seed);
  const ReferenceKind kind = parse_kind(kind_name);
  const SpecimenImage x = load_specimen(image, n);
  const Composite comp = make_composite(x, kind);
  const DiffractionData y = diffract(comp, m);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_csv_matrix((dir / "specimen_re.csv").string(), x.values, false);
  write_csv_matrix((dir / "specimen_im.csv").string(), x.values, true);
  write_csv_matrix((dir / "y.csv").string(), y.y);
  if (!noiseless) {
    const double n_photons = pp * double(m) * m;
    const DiffractionData noisy = corrupt(y, PoissonConfig{n_photons, seed});
    write_csv_matrix((dir / "y_noisy.csv").string(), noisy.y);
  }
  nlohmann::ordered_json j;
  j["image"] = image;
  j["n"] = n;
  j["m"] = m;
  j["kind"] = kind_name;
  j["photons_per_pixel"] = pp;
  j["noiseless"] = noiseless;
  j["seed"] = seed;
  std::ofstream meta(dir / "meta.json");
  meta << j.dump(2) << '\n';
  std::cout << "wrote " << (noiseless ? "noiseless" : "noisy") << " " << kind_name
            << " data for " << image << " to " << out_dir << "\n";
  return 0;
}

int cmd_recover(const std::string& data_path, int n, const std::string& method,
                const std::string& out_dir, double beta, int iters, int er_iters, int restarts,
                uint64_t seed) {
  seed = apply_seed_env(seed);
  DiffractionData d;
  d.y = read_csv_matrix(data_path);
  if (d.y.rows() != d.y.cols())
    throw std::invalid_argument("recover: data must be a square intensity grid");
  d.m = d.y.rows();
  RecoveryResult res;
  if (method == "dual") {
    res = recover_dual_fast(d, n);
  } else if (method == "dual_naive") {
    res = recover_dual_naive(d, n);
  } else if (method == "block" || method == "pinhole") {
    res = recover_single(d, n, parse_kind(method));
  } else if (method == "hio_a" || method == "hio_b" || method == "hio_c") {
    HioConfig hc;
    hc.beta = beta;
    hc.n_iters = iters;
    hc.er_iters = er_iters;
    hc.n_restarts = restarts;
    hc.seed = seed;
    const ReferenceKind kind = method == "hio_a"   ? ReferenceKind::None
                               : method == "hio_b" ? ReferenceKind::Block
                                                   : ReferenceKind::Pinhole;
    res = recover_hio(d, n, kind, hc);
  } else {
    throw CLI::ValidationError("--method", "unknown method " + method);
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_csv_matrix((dir / "xhat_re.csv").string(), res.x_hat, false);
  write_csv_matrix((dir / "xhat_im.csv").string(), res.x_hat, true);
  nlohmann::ordered_json j;
  j["method"] = method;
  j["n"] = n;
  j["m"] = d.m;
  j["wall_time_s"] = res.wall_time_s;
  if (res.fourier_residual > 0) j["fourier_residual"] = res.fourier_residual;
  if (res.clamped_negatives > 0) j["clamped_negatives"] = res.clamped_negatives;
  std::ofstream meta(dir / "recover.json");
  meta << j.dump(2) << '\n';
  std::cout << "recovered " << n << "x" << n << " specimen with " << method << " in "
            << res.wall_time_s << " s\n";
  return 0;
}

int cmd_errmap(int n, int m, int stride, const std::string& out_dir) {
  require_pow2(m);
  emit_weight_maps(n, m, stride, out_dir);
  std::cout << "wrote weight maps (stride " << stride << ") to " << out_dir << "\n";
  return 0;
}

int cmd_table(ExperimentConfig cfg) {
  require_pow2(cfg.m);
  cfg.seed = apply_seed_env(cfg.seed);
  const auto rows = run_experiment(cfg);
  std::cout << results_to_csv(rows);
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.ok;
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holodeconv: dual-reference holographic phase retrieval toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate oversampled diffraction data");
  std::string sim_image = "phantom:1", sim_kind = "dual", sim_out = "sim_out";
  int sim_n = 64, sim_m = 1024;
  double sim_pp = 1000;
  bool sim_noiseless = false;
  uint64_t sim_seed = 0;
  sim->add_option("--image", sim_image, "image path (.pgm/.csv) or phantom:<id>");
  sim->add_option("--n", sim_n, "specimen side length");
  sim->add_option("--m", sim_m, "detector side length (power of two)");
  sim->add_option("--kind", sim_kind, "reference kind: block|pinhole|dual|none");
  sim->add_option("--photons-per-pixel", sim_pp, "photon budget per detector pixel");
  sim->add_flag("--noiseless", sim_noiseless, "skip the shot-noise model");
  sim->add_option("--seed", sim_seed, "noise seed (HOLODECONV_SEED overrides)");
  sim->add_option("--out", sim_out, "output directory");

  // recover
  auto* rec = app.add_subcommand("recover", "recover a specimen from intensity data");
  std::string rec_data, rec_method = "dual", rec_out = "recover_out";
  int rec_n = 64;
  double rec_beta = 0.9;
  int rec_iters = 2000, rec_er = 50, rec_restarts = 5;
  uint64_t rec_seed = 0;
  rec->add_option("--data", rec_data, "intensity CSV (square grid)")->required();
  rec->add_option("--n", rec_n, "specimen side length");
  rec->add_option("--method", rec_method, "dual|dual_naive|block|pinhole|hio_a|hio_b|hio_c");
  rec->add_option("--out", rec_out, "output directory");
  rec->add_option("--beta", rec_beta, "HIO feedback parameter");
  rec->add_option("--iters", rec_iters, "HIO iterations per restart");
  rec->add_option("--er-iters", rec_er, "error-reduction polish iterations");
  rec->add_option("--restarts", rec_restarts, "HIO restarts");
  rec->add_option("--seed", rec_seed, "HIO restart seed (HOLODECONV_SEED overrides)");

  // errmap
  auto* err = app.add_subcommand("errmap", "emit frequency weight maps and cross-sections");
  int err_n = 64, err_m = 1024, err_stride = 8;
  std::string err_out = "errmap_out";
  err->add_option("--n", err_n, "specimen side length");
  err->add_option("--m", err_m, "detector side length (power of two)");
  err->add_option("--stride", err_stride, "grid subsampling stride");
  err->add_option("--out", err_out, "output directory");

  // table
  auto* tab = app.add_subcommand("table", "run an image x method experiment table");
  ExperimentConfig cfg;
  tab->add_option("--image", cfg.images, "image path or phantom:<id> (repeatable)");
  tab->add_option("--n", cfg.n, "specimen side length");
  tab->add_option("--m", cfg.m, "detector side length (power of two)");
  tab->add_option("--photons-per-pixel", cfg.photons_per_pixel, "photon budget per pixel");
  tab->add_option("--method", cfg.methods,
                  "method: dual|block|pinhole|hio_a|hio_b|hio_c (repeatable)");
  tab->add_option("--trials", cfg.n_trials, "noisy trials per cell");
  tab->add_option("--seed", cfg.seed, "master seed (HOLODECONV_SEED overrides)");
  tab->add_flag("--noiseless", cfg.noiseless, "skip the shot-noise model");
  tab->add_option("--out", cfg.output_dir, "output directory for results.csv + manifest.json");
  tab->add_flag("--emit-maps", cfg.emit_maps, "also write weight-map artifacts");
  tab->add_option("--map-stride", cfg.map_stride, "weight-map grid stride");
  tab->add_option("--hio-beta", cfg.hio_beta, "HIO feedback parameter");
  tab->add_option("--hio-iters", cfg.hio_iters, "HIO iterations per restart");
  tab->add_option("--hio-er-iters", cfg.hio_er_iters, "error-reduction polish iterations");
  tab->add_option("--hio-restarts", cfg.hio_restarts, "HIO restarts");

  // verify
  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  int ver_only = 0;
  ver->add_option("--only", ver_only, "run a single criterion (1-9), 0 = all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_image, sim_n, sim_m, sim_kind, sim_pp, sim_noiseless, sim_seed,
                          sim_out);
    if (rec->parsed())
      return cmd_recover(rec_data, rec_n, rec_method, rec_out, rec_beta, rec_iters, rec_er,
                         rec_restarts, rec_seed);
    if (err->parsed()) return cmd_errmap(err_n, err_m, err_stride, err_out);
    if (tab->parsed()) return cmd_table(cfg);
    if (ver->parsed()) return run_acceptance(std::cout, ver_only) == 0 ? 0 : 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
