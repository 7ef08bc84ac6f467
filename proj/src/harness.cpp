#include "moram/harness.hpp"

#include "moram/init.hpp"
#include "moram/model.hpp"
#include "moram/wavelet.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace moram {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

// Error text must not break the CSV row.
std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

void run_parallel(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
}

}  // namespace

void SweepConfig::validate() const {
  if (n < 1) throw InvalidArgument("sweep: n must be positive");
  if (trials < 1) throw InvalidArgument("sweep: trials must be at least 1");
  if (s_list.empty() || m_list.empty() || r_list.empty()) {
    throw InvalidArgument("sweep: s, m and R lists must be non-empty");
  }
  for (Index s : s_list) {
    if (s < 1 || s > n) throw InvalidArgument("sweep: every s must lie in [1, n]");
  }
  for (Index m : m_list) {
    if (m < 1) throw InvalidArgument("sweep: every m must be positive");
    if (static_cast<double>(m) * static_cast<double>(n + m) > kMaxTrialEntries) {
      throw InvalidArgument("sweep: m = " + std::to_string(m) + " exceeds the per-trial memory cap");
    }
  }
  for (double r : r_list) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("sweep: every R must be positive");
  }
  descent.validate();
}

double SweepResult::mean_error(Index s, Index m, double range_r) const {
  for (const CellSummary& c : cells) {
    if (c.s == s && c.m == m && c.range_r == range_r) return c.mean_rel_error;
  }
  throw InvalidArgument("SweepResult: no such cell");
}

std::uint64_t trial_seed(std::uint64_t base_seed, Index s, Index m, double range_r, int trial) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(m),
                      std::bit_cast<std::uint64_t>(range_r), static_cast<std::uint64_t>(trial)});
}

std::vector<TrialSpec> expand_grid(const SweepConfig& cfg) {
  std::vector<TrialSpec> grid;
  grid.reserve(cfg.s_list.size() * cfg.m_list.size() * cfg.r_list.size() * static_cast<std::size_t>(cfg.trials));
  for (Index s : cfg.s_list) {
    for (Index m : cfg.m_list) {
      for (double r : cfg.r_list) {
        for (int t = 0; t < cfg.trials; ++t) {
          grid.push_back(TrialSpec{cfg.n, m, s, r, t, trial_seed(cfg.base_seed, s, m, r, t)});
        }
      }
    }
  }
  return grid;
}

ExperimentRecord run_trial(const TrialSpec& spec, const DescentConfig& descent, bool strict_range) {
  ExperimentRecord rec;
  rec.n = spec.n;
  rec.m = spec.m;
  rec.s = spec.s;
  rec.range_r = spec.range_r;
  rec.trial = spec.trial;
  rec.seed = spec.seed;
  rec.rel_error = std::numeric_limits<double>::quiet_NaN();

  const auto start = Clock::now();
  try {
    const MeasurementEnsemble a = gaussian_matrix(spec.m, spec.n, derive_seed({spec.seed, 1}));
    const SparseSignal x_star = random_sparse_signal(spec.n, spec.s, derive_seed({spec.seed, 2}), true);
    const ModuloObservation obs = forward(a, x_star, spec.range_r, strict_range);
    const SparseSignal x0 = moram_initialize(obs, a, spec.s);
    const DescentResult res = moram_descent(obs, a, spec.s, descent, x0);
    rec.rel_error = relative_error(res.x.values(), x_star.values());
    rec.exact = rec.rel_error < kExactThreshold;
    rec.altmin_iters = res.trace.size();
    rec.bin_flips = res.trace.iterations.empty() ? 0 : res.trace.iterations.back().bin_flips;
  } catch (const std::exception& e) {
    rec.error = sanitize(e.what());
  }
  rec.wall_ms = elapsed_ms(start);
  return rec;
}

std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<Index, Index, double, Index>;
  std::map<Key, CellSummary> cells;
  std::vector<Key> order;
  for (const ExperimentRecord& r : records) {
    const Key key{r.s, r.m, r.range_r, r.n};
    auto [it, inserted] = cells.try_emplace(key);
    CellSummary& c = it->second;
    if (inserted) {
      order.push_back(key);
      c.n = r.n;
      c.m = r.m;
      c.s = r.s;
      c.range_r = r.range_r;
    }
    ++c.trials;
    if (!r.error.empty()) {
      ++c.failed;
      continue;
    }
    c.mean_rel_error += r.rel_error;
    c.exact_fraction += r.exact ? 1.0 : 0.0;
  }
  std::vector<CellSummary> out;
  out.reserve(order.size());
  for (const Key& key : order) {
    CellSummary c = cells.at(key);
    const int ok = c.trials - c.failed;
    if (ok > 0) {
      c.mean_rel_error /= ok;
      c.exact_fraction /= ok;
    } else {
      c.mean_rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(c);
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<TrialSpec> grid = expand_grid(cfg);
  SweepResult result;
  result.records.resize(grid.size());
  run_parallel(grid.size(), cfg.workers, [&](std::size_t i) {
    result.records[i] = run_trial(grid[i], cfg.descent, cfg.strict_range);
  });
  result.cells = summarize(result.records);
  if (!cfg.output_path.empty()) write_csv(cfg.output_path, result.records);
  return result;
}

std::string csv_header() { return "n,m,s,R,trial,seed,rel_error,exact,altmin_iters,bin_flips,wall_ms,error"; }

std::string csv_row(const ExperimentRecord& rec) {
  std::ostringstream row;
  row << rec.n << ',' << rec.m << ',' << rec.s << ',' << format_double(rec.range_r, 17) << ',' << rec.trial << ','
      << rec.seed << ',' << format_double(rec.rel_error, 17) << ',' << (rec.exact ? 1 : 0) << ','
      << rec.altmin_iters << ',' << rec.bin_flips << ',' << format_double(rec.wall_ms, 6) << ','
      << sanitize(rec.error);
  return row.str();
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const ExperimentRecord& r : records) out += csv_row(r) + "\n";
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_csv(records);
  if (!out) throw Error("write failed for " + path.string());
}

std::string strip_wall_ms(const std::string& csv) {
  constexpr int kWallColumn = 10;
  std::istringstream in(csv);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    int column = 0;
    std::string kept;
    std::size_t begin = 0;
    while (true) {
      const std::size_t end = line.find(',', begin);
      if (column != kWallColumn) kept.append(line, begin, end == std::string::npos ? std::string::npos : end - begin);
      if (end == std::string::npos) break;
      kept.push_back(',');
      begin = end + 1;
      ++column;
    }
    out += kept + "\n";
  }
  return out;
}

void ImageConfig::validate(Index n) const {
  if (s < 1) throw InvalidArgument("image: s must be at least 1");
  if (s >= n) throw InvalidArgument("image: s must be smaller than the pixel count");
  if (m < 1) throw InvalidArgument("image: m must be positive");
  if (s >= m) throw InvalidArgument("image: s must be smaller than m for recovery to be meaningful");
  if (static_cast<double>(m) * static_cast<double>(n + m) > kMaxTrialEntries) {
    throw InvalidArgument("image: m exceeds the memory cap");
  }
  if (!(range_r > 0.0)) throw InvalidArgument("image: R must be positive");
  descent.validate();
}

ImageReport run_image(const ImageConfig& cfg) { return run_image(cfg, read_pgm(cfg.image_path)); }

ImageReport run_image(const ImageConfig& cfg, const Matrix& image) {
  const auto start = Clock::now();
  const double peak = cfg.peak255 ? 255.0 : 1.0;
  const Matrix original = image * peak;
  const Index n = original.size();
  if (original.rows() != original.cols() || (n & (n - 1)) != 0) {
    throw InvalidArgument("image: expected a square power-of-two image");
  }
  cfg.validate(n);

  const SparsifiedImage sparse = sparsify(original, cfg.s);
  const double scale = sparse.coefficients.norm();
  if (scale == 0.0) throw InvalidArgument("image: image has no energy to recover");
  const SparseSignal x_star(sparse.coefficients / scale, cfg.s);

  const MeasurementEnsemble a = gaussian_matrix(cfg.m, n, cfg.seed);
  ModuloObservation obs = [&] {
    try {
      return forward(a, x_star, cfg.range_r, cfg.strict_range);
    } catch (const DynamicRangeViolation& e) {
      throw DynamicRangeViolation(std::string(e.what()) +
                                      "; increase R or rescale the coefficient vector (it is measured at unit norm)",
                                  e.indices());
    }
  }();
  const SparseSignal x0 = moram_initialize(obs, a, cfg.s);
  const DescentResult res = moram_descent(obs, a, cfg.s, cfg.descent, x0);

  ImageReport rep;
  rep.n = n;
  rep.m = cfg.m;
  rep.s = cfg.s;
  rep.range_r = cfg.range_r;
  rep.seed = cfg.seed;
  rep.rel_error = relative_error(res.x.values(), x_star.values());
  rep.altmin_iters = res.trace.size();
  rep.converged = res.trace.converged;
  rep.original = original;
  rep.reference = sparse.reference;
  rep.recovered = haar2_inverse(unflatten(res.x.values() * scale, original.rows(), original.cols()));
  rep.psnr_original = psnr(rep.original, rep.recovered, peak);
  rep.psnr_reference = psnr(rep.reference, rep.recovered, peak);
  rep.wall_ms = elapsed_ms(start);
  return rep;
}

std::string image_csv_header() {
  return "image,n,m,s,R,seed,rel_error,psnr_original,psnr_reference,altmin_iters,converged,wall_ms";
}

std::string image_csv_row(const ImageReport& rep, const std::string& image_name) {
  std::ostringstream row;
  row << sanitize(image_name) << ',' << rep.n << ',' << rep.m << ',' << rep.s << ','
      << format_double(rep.range_r, 17) << ',' << rep.seed << ',' << format_double(rep.rel_error, 17) << ','
      << format_double(rep.psnr_original, 10) << ',' << format_double(rep.psnr_reference, 10) << ','
      << rep.altmin_iters << ',' << (rep.converged ? 1 : 0) << ',' << format_double(rep.wall_ms, 6);
  return row.str();
}

void write_image_outputs(const ImageReport& rep, const std::filesystem::path& prefix, const std::string& image_name,
                         bool peak255) {
  const double peak = peak255 ? 255.0 : 1.0;
  auto with_suffix = [&](const char* suffix) {
    std::filesystem::path p = prefix;
    p += suffix;
    return p;
  };
  write_pgm(with_suffix("_recovered.pgm"), rep.recovered / peak);
  write_pgm(with_suffix("_residual.pgm"), (rep.original - rep.recovered).cwiseAbs() / peak);
  std::ofstream csv(with_suffix("_metrics.csv"), std::ios::binary);
  if (!csv) throw Error("cannot write metrics for " + prefix.string());
  csv << image_csv_header() << "\n" << image_csv_row(rep, image_name) << "\n";
}

}  // namespace moram
