#include "holodeconv/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "holodeconv/fft.hpp"
#include "holodeconv/noise_model.hpp"
#include "holodeconv/recovery.hpp"

namespace holo {

namespace {

constexpr const char* kVersion = "0.1.0";

bool has_suffix(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  std::string tail = s.substr(s.size() - suf.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tail == suf;
}

int pgm_next_int(std::istream& in) {
  // Skip whitespace and '#' comments between header tokens.
  for (;;) {
    const int c = in.peek();
    if (c == EOF) throw std::invalid_argument("pgm: truncated header");
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int v = 0;
  if (!(in >> v)) throw std::invalid_argument("pgm: malformed header");
  return v;
}

RMat read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open image file: " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw std::invalid_argument("pgm: unsupported magic in " + path);
  const bool binary = m1 == '5';
  const int w = pgm_next_int(in);
  const int h = pgm_next_int(in);
  const int maxval = pgm_next_int(in);
  if (w < 1 || h < 1) throw std::invalid_argument("pgm: bad dimensions in " + path);
  if (maxval < 1 || maxval > 255)
    throw std::invalid_argument("pgm: only maxval <= 255 supported in " + path);
  RMat img(h, w);
  if (binary) {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> buf(size_t(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (in.gcount() != std::streamsize(buf.size()))
      throw std::invalid_argument("pgm: truncated pixel data in " + path);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) img(i, j) = double(buf[size_t(i) * w + j]) / maxval;
  } else {
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        int v = 0;
        if (!(in >> v)) throw std::invalid_argument("pgm: truncated pixel data in " + path);
        if (v < 0 || v > maxval)
          throw std::invalid_argument("pgm: pixel out of range in " + path);
        img(i, j) = double(v) / maxval;
      }
  }
  return img;
}

/// Area-weighted average resample to n x n; exact block means for integer
/// ratios.
RMat box_average(const RMat& src, int n) {
  const int h = src.rows(), w = src.cols();
  RMat out(n, n);
  const double ry = double(h) / n, rx = double(w) / n;
  for (int i = 0; i < n; ++i) {
    const double r0 = i * ry, r1 = (i + 1) * ry;
    for (int j = 0; j < n; ++j) {
      const double c0 = j * rx, c1 = (j + 1) * rx;
      double acc = 0;
      for (int rr = int(std::floor(r0)); rr < h && rr < int(std::ceil(r1)); ++rr) {
        const double wr = std::min(r1, double(rr + 1)) - std::max(r0, double(rr));
        if (wr <= 0) continue;
        for (int cc = int(std::floor(c0)); cc < w && cc < int(std::ceil(c1)); ++cc) {
          const double wc = std::min(c1, double(cc + 1)) - std::max(c0, double(cc));
          if (wc <= 0) continue;
          acc += wr * wc * src(rr, cc);
        }
      }
      out(i, j) = acc / (ry * rx);
    }
  }
  return out;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

RMat read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open csv file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: non-numeric cell in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("csv: empty file " + path);
  RMat a(int(rows.size()), int(rows.front().size()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
  return a;
}

void write_csv_matrix(const std::string& path, const RMat& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_g(a(i, j));
    }
    out << '\n';
  }
}

void write_csv_matrix(const std::string& path, const CMat& a, bool imag_part) {
  RMat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = imag_part ? a(i, j).imag() : a(i, j).real();
  write_csv_matrix(path, r);
}

void write_pgm16_log(const std::string& path, const RMat& a) {
  double hi = 0, lo_pos = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double v = a.data()[i];
    hi = std::max(hi, v);
    if (v > 0 && (lo_pos == 0 || v < lo_pos)) lo_pos = v;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << a.cols() << ' ' << a.rows() << "\n65535\n";
  const double floor_v = hi > 0 ? std::max(lo_pos, hi * 1e-8) : 1.0;
  const double denom = hi > floor_v ? std::log(hi / floor_v) : 1.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      double t = 0;
      if (hi > 0 && a(i, j) > 0)
        t = std::clamp(std::log(std::max(a(i, j), floor_v) / floor_v) / denom, 0.0, 1.0);
      const auto q = uint16_t(std::lround(t * 65535.0));
      out.put(char(q >> 8));
      out.put(char(q & 0xFF));
    }
}

SpecimenImage ingest_image(const std::string& path, int n) {
  if (n < 1) throw std::invalid_argument("ingest_image: n must be >= 1");
  RMat raw;
  if (has_suffix(path, ".pgm")) {
    raw = read_pgm(path);
  } else if (has_suffix(path, ".csv")) {
    raw = read_csv_matrix(path);
    for (size_t i = 0; i < raw.size(); ++i)
      if (raw.data()[i] < 0 || raw.data()[i] > 1)
        throw std::invalid_argument("ingest_image: csv values must lie in [0, 1]: " + path);
  } else {
    throw std::invalid_argument("ingest_image: unsupported extension (want .pgm or .csv): " +
                                path);
  }
  const RMat small = box_average(raw, n);
  CMat values(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) values(i, j) = small(i, j);
  return make_specimen(std::move(values));
}

SpecimenImage make_phantom(int n, uint64_t id) {
  if (n < 1) throw std::invalid_argument("make_phantom: n must be >= 1");
  RandomStream rng(id, 0u, 0u, /*tag=*/2u);
  // Broad elliptical blobs give each phantom its large-scale anatomy.
  const int n_blobs = 3 + int(id % 4);
  struct Blob {
    double cy, cx, sy, sx, amp;
  };
  std::vector<Blob> blobs(n_blobs);
  for (auto& b : blobs) {
    b.cy = n * (0.2 + 0.6 * rng.next_double());
    b.cx = n * (0.2 + 0.6 * rng.next_double());
    b.sy = n * (0.08 + 0.14 * rng.next_double());
    b.sx = n * (0.08 + 0.14 * rng.next_double());
    b.amp = 0.4 + 0.6 * rng.next_double();
  }
  // Power-law random texture on top. Spectral amplitude ~ (1+f)^-1.2 mimics
  // the 1/f-type falloff of natural micrographs: most energy sits at low
  // frequencies, but every scale keeps genuine detail. A pure blob sum is
  // effectively bandlimited and unrealistically easy for iterative solvers.
  FftBuf spectrum(size_t(n) * n), field(size_t(n) * n);
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      const double u1 = rng.next_double();
      const double u2 = rng.next_double();
      const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      const double w1 = std::min(k1, n - k1), w2 = std::min(k2, n - k2);
      const double amp = std::pow(1.0 + std::hypot(w1, w2), -1.2);
      spectrum[size_t(k1) * n + k2] =
          amp * cxd(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
    }
  spectrum[0] = 0.0;  // mean level comes from the deterministic base instead
  ifft2(n, spectrum.data(), field.data());
  double var = 0.0;
  for (size_t i = 0; i < field.size(); ++i) {
    const double g = field[i].real();
    var += g * g;
  }
  const double sd = std::sqrt(var / double(field.size()));

  CMat values(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.12;
      for (const auto& b : blobs)
        v += b.amp * std::exp(-0.5 * ((i - b.cy) * (i - b.cy) / (b.sy * b.sy) +
                                      (j - b.cx) * (j - b.cx) / (b.sx * b.sx)));
      if (sd > 0) v += 0.18 * field[size_t(i) * n + j].real() / sd;
      values(i, j) = std::clamp(v, 0.0, 1.0);
    }
  return make_specimen(std::move(values));
}

namespace {

struct CellOutcome {
  double empirical = 0;
  std::optional<double> expected;
  double std_err = 0;
  int trials = 0;
};

CellOutcome run_cell(const ExperimentConfig& cfg, const SpecimenImage& x,
                     const std::string& image_id, const std::string& method,
                     std::map<std::string, WeightMap>& map_cache) {
  const double xnorm = frob_norm_sq(x.values);
  if (xnorm <= 0) throw std::invalid_argument("specimen has zero norm");
  const double n_photons = cfg.photons_per_pixel * double(cfg.m) * cfg.m;

  const bool is_hio = method.rfind("hio", 0) == 0;
  ReferenceKind kind;
  if (method == "dual")
    kind = ReferenceKind::Dual;
  else if (method == "block" || method == "hio_b")
    kind = ReferenceKind::Block;
  else if (method == "pinhole" || method == "hio_c")
    kind = ReferenceKind::Pinhole;
  else if (method == "hio_a")
    kind = ReferenceKind::None;
  else
    throw std::invalid_argument("unknown method: " + method);

  const Composite comp = make_composite(x, kind);
  const DiffractionData y = diffract(comp, cfg.m);

  CellOutcome out;
  if (!is_hio) {
    auto it = map_cache.find(method);
    if (it == map_cache.end())
      it = map_cache.emplace(method, weight_map_closed_form(cfg.n, cfg.m, kind)).first;
    out.expected = expected_error(it->second, y, n_photons, xnorm).expected_rel;
  }

  const int n_trials = cfg.noiseless ? 1 : std::max(1, cfg.n_trials);
  std::vector<double> eps(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    const uint64_t seed_t = derive_seed(cfg.seed, image_id.c_str(), method.c_str(), uint64_t(t));
    DiffractionData data = cfg.noiseless ? y : corrupt(y, PoissonConfig{n_photons, seed_t});
    CMat x_hat;
    if (method == "dual") {
      x_hat = recover_dual_fast(data, cfg.n).x_hat;
    } else if (!is_hio) {
      x_hat = recover_single(data, cfg.n, kind).x_hat;
    } else {
      HioConfig hc;
      hc.beta = cfg.hio_beta;
      hc.n_iters = cfg.hio_iters;
      hc.er_iters = cfg.hio_er_iters;
      hc.n_restarts = cfg.hio_restarts;
      hc.seed = seed_t;
      x_hat = recover_hio(data, cfg.n, kind, hc).x_hat;
    }
    if (method == "hio_a") {
      eps[t] = registered_relative_error(x.values, x_hat, true);
    } else {
      double acc = 0;
      for (size_t i = 0; i < x.values.size(); ++i)
        acc += std::norm(x.values.data()[i] - x_hat.data()[i]);
      eps[t] = acc / xnorm;
    }
  }
  double mean = 0;
  for (double e : eps) mean += e;
  mean /= n_trials;
  double var = 0;
  for (double e : eps) var += (e - mean) * (e - mean);
  out.empirical = mean;
  out.std_err = n_trials > 1 ? std::sqrt(var / (n_trials - 1.0) / n_trials) : 0.0;
  out.trials = n_trials;
  return out;
}

std::string image_display_id(const std::string& spec) {
  if (spec.rfind("phantom:", 0) == 0) return spec;
  return std::filesystem::path(spec).filename().string();
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("run_experiment: n must be >= 1");
  if (cfg.m < 4 * cfg.n - 1) throw std::invalid_argument("run_experiment: need m >= 4n - 1");
  if (!cfg.noiseless && !(cfg.photons_per_pixel > 0))
    throw std::invalid_argument("run_experiment: photons_per_pixel must be positive");
  if (cfg.images.empty()) throw std::invalid_argument("run_experiment: no images given");
  if (cfg.methods.empty()) throw std::invalid_argument("run_experiment: no methods given");

  std::vector<ResultRow> rows;
  std::map<std::string, WeightMap> map_cache;
  for (const auto& spec : cfg.images) {
    const std::string id = image_display_id(spec);
    SpecimenImage x;
    bool loaded = true;
    std::string load_error;
    try {
      if (spec.rfind("phantom:", 0) == 0) {
        const uint64_t pid = std::stoull(spec.substr(8));
        x = make_phantom(cfg.n, pid);
      } else {
        x = ingest_image(spec, cfg.n);
      }
    } catch (const std::exception& e) {
      loaded = false;
      load_error = e.what();
    }
    for (const auto& method : cfg.methods) {
      ResultRow row;
      row.image = id;
      row.method = method;
      const auto t0 = std::chrono::steady_clock::now();
      if (!loaded) {
        row.ok = false;
        row.message = load_error;
      } else {
        try {
          const CellOutcome c = run_cell(cfg, x, id, method, map_cache);
          row.empirical_rel_err = c.empirical;
          row.expected_rel_err = c.expected;
          row.std_err = c.std_err;
          row.trials = c.trials;
        } catch (const std::exception& e) {
          row.ok = false;
          row.message = e.what();
        }
      }
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!row.ok)
        std::cerr << "[holodeconv] " << row.image << "/" << row.method << " failed: "
                  << row.message << "\n";
      rows.push_back(std::move(row));
    }
  }

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    {
      std::ofstream out(dir / "results.csv");
      if (!out) throw std::runtime_error("cannot write results.csv");
      out << results_to_csv(rows);
    }
    {
      nlohmann::ordered_json j;
      j["version"] = kVersion;
      j["seed"] = cfg.seed;
      j["n"] = cfg.n;
      j["m"] = cfg.m;
      j["photons_per_pixel"] = cfg.photons_per_pixel;
      j["n_trials"] = cfg.n_trials;
      j["noiseless"] = cfg.noiseless;
      j["images"] = cfg.images;
      j["methods"] = cfg.methods;
      j["hio"] = {{"beta", cfg.hio_beta},
                  {"iters", cfg.hio_iters},
                  {"er_iters", cfg.hio_er_iters},
                  {"restarts", cfg.hio_restarts}};
      nlohmann::ordered_json failures = nlohmann::ordered_json::array();
      for (const auto& r : rows)
        if (!r.ok) failures.push_back({{"image", r.image}, {"method", r.method}, {"error", r.message}});
      j["failures"] = failures;
      std::ofstream out(dir / "manifest.json");
      if (!out) throw std::runtime_error("cannot write manifest.json");
      out << j.dump(2) << '\n';
    }
    if (cfg.emit_maps) emit_weight_maps(cfg.n, cfg.m, cfg.map_stride, cfg.output_dir);
  }
  return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "image,method,empirical_rel_err,expected_rel_err,stderr,trials,wall_time_s\n";
  char buf[64];
  for (const auto& r : rows) {
    if (!r.ok) continue;
    out += r.image + ',' + r.method + ',';
    out += format_g(r.empirical_rel_err) + ',';
    if (r.expected_rel_err) out += format_g(*r.expected_rel_err);
    out += ',';
    out += format_g(r.std_err) + ',';
    std::snprintf(buf, sizeof(buf), "%d", r.trials);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%.3f", r.wall_time_s);
    out += std::string(",") + buf + '\n';
  }
  return out;
}

void emit_weight_maps(int n, int m, int stride, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const WeightMapComparison c = compare_weight_maps(n, m, stride);
  write_csv_matrix((dir / "s_block.csv").string(), c.block.s);
  write_csv_matrix((dir / "s_pinhole.csv").string(), c.pinhole.s);
  write_csv_matrix((dir / "s_dual.csv").string(), c.dual.s);
  write_csv_matrix((dir / "ratio_dual_over_best_single.csv").string(), c.ratio);
  write_pgm16_log((dir / "s_block.pgm").string(), c.block.s);
  write_pgm16_log((dir / "s_pinhole.pgm").string(), c.pinhole.s);
  write_pgm16_log((dir / "s_dual.pgm").string(), c.dual.s);
  {
    std::ofstream out(dir / "cross_sections.csv");
    if (!out) throw std::runtime_error("cannot write cross_sections.csv");
    out << "border,k,s_block,s_pinhole,s_dual\n";
    const char* names[4] = {"top", "bottom", "left", "right"};
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < m; ++k) {
        const size_t idx = size_t(b) * m + k;
        out << names[b] << ',' << k << ',' << format_g(c.border_block[idx]) << ','
            << format_g(c.border_pinhole[idx]) << ',' << format_g(c.border_dual[idx]) << '\n';
      }
  }
  {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["m"] = m;
    j["stride"] = stride;
    j["median_ratio_dual_over_best_single"] = c.median_ratio;
    std::ofstream out(dir / "weight_map_summary.json");
    if (!out) throw std::runtime_error("cannot write weight_map_summary.json");
    out << j.dump(2) << '\n';
  }
}

}  // namespace holo
