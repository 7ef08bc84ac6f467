#ifndef MORAM_HARNESS_HPP
#define MORAM_HARNESS_HPP

#include "moram/altmin.hpp"
#include "moram/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace moram {

// Monte Carlo grid over (s, m, R, trial).
struct SweepConfig {
  Index n = 1000;
  std::vector<Index> s_list{3, 6, 9, 12};
  std::vector<Index> m_list{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  std::vector<double> r_list{4.0, 4.25, 4.5};
  int trials = 10;
  std::uint64_t base_seed = 0;
  DescentConfig descent;
  bool strict_range = true;
  // 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
  // Empty disables CSV output.
  std::filesystem::path output_path;

  void validate() const;
};

// Largest m * (n + m) the harness will allocate for one trial.
inline constexpr double kMaxTrialEntries = 2.5e8;

struct TrialSpec {
  Index n = 0;
  Index m = 0;
  Index s = 0;
  double range_r = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
};

struct ExperimentRecord {
  Index n = 0;
  Index m = 0;
  Index s = 0;
  double range_r = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  // NaN when the trial failed before producing an estimate.
  double rel_error = 0.0;
  bool exact = false;
  Index altmin_iters = 0;
  Index bin_flips = 0;
  double wall_ms = 0.0;
  std::string error;
};

inline constexpr double kExactThreshold = 1e-6;

struct CellSummary {
  Index n = 0;
  Index m = 0;
  Index s = 0;
  double range_r = 0.0;
  int trials = 0;
  int failed = 0;
  // Over trials that produced an estimate.
  double mean_rel_error = 0.0;
  double exact_fraction = 0.0;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<CellSummary> cells;

  // Mean relative error of the (s, m, R) cell; throws if absent.
  double mean_error(Index s, Index m, double range_r) const;
};

std::uint64_t trial_seed(std::uint64_t base_seed, Index s, Index m, double range_r, int trial);

// Grid in the order s, m, R, trial (outermost first).
std::vector<TrialSpec> expand_grid(const SweepConfig& cfg);

// Draws A and a unit-norm x* from the trial seed, then runs forward model,
// initialization and descent. Failures are captured in the record.
ExperimentRecord run_trial(const TrialSpec& spec, const DescentConfig& descent, bool strict_range);

std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records);

SweepResult run_sweep(const SweepConfig& cfg);

std::string csv_header();
std::string csv_row(const ExperimentRecord& rec);
std::string to_csv(const std::vector<ExperimentRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);

// CSV text with the wall_ms column blanked, for determinism comparisons.
std::string strip_wall_ms(const std::string& csv);

struct ImageConfig {
  std::filesystem::path image_path;
  Index s = 800;
  Index m = 6000;
  double range_r = 4.5;
  std::uint64_t seed = 0;
  DescentConfig descent;
  bool strict_range = true;
  // Work in 0..255 pixel units with peak 255 instead of [0, 1] with peak 1.
  bool peak255 = false;

  void validate(Index n) const;
};

struct ImageReport {
  Index n = 0;
  Index m = 0;
  Index s = 0;
  double range_r = 0.0;
  std::uint64_t seed = 0;
  double rel_error = 0.0;
  double psnr_original = 0.0;
  double psnr_reference = 0.0;
  Index altmin_iters = 0;
  bool converged = false;
  double wall_ms = 0.0;
  Matrix original;
  Matrix reference;
  Matrix recovered;
};

// Sparsify, measure the (unit-normalized) Haar coefficients, recover with
// MoRAM and transform back. The coefficient scale is restored after recovery.
ImageReport run_image(const ImageConfig& cfg);
ImageReport run_image(const ImageConfig& cfg, const Matrix& image);

std::string image_csv_header();
std::string image_csv_row(const ImageReport& rep, const std::string& image_name);

// Writes <prefix>_recovered.pgm, <prefix>_residual.pgm and <prefix>_metrics.csv.
void write_image_outputs(const ImageReport& rep, const std::filesystem::path& prefix,
                         const std::string& image_name, bool peak255);

}  // namespace moram

#endif  // MORAM_HARNESS_HPP
