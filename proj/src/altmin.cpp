#include "moram/altmin.hpp"

#include "moram/init.hpp"
#include "moram/model.hpp"

#include <cmath>

namespace moram {

namespace {

// Least-squares polish of the thresholded Justice Pursuit estimate. Rows
// whose recovered corruption exceeds R/2 are treated as mis-binned and left
// out of the fit.
Vector polish(const Matrix& a, const Vector& y_corrected, const JusticePursuitResult& jp, Index s,
              double range_r) {
  const std::vector<Index> support = largest_indices(jp.x_hat, s);
  std::vector<Index> clean;
  clean.reserve(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) {
    if (std::abs(jp.d_hat.d[i]) < 0.5 * range_r) clean.push_back(i);
  }
  if (clean.size() < support.size()) {
    return least_squares_on_support(a, y_corrected, support);
  }
  Matrix rows(static_cast<Index>(clean.size()), a.cols());
  Vector rhs(static_cast<Index>(clean.size()));
  for (std::size_t k = 0; k < clean.size(); ++k) {
    rows.row(static_cast<Index>(k)) = a.row(clean[k]);
    rhs[static_cast<Index>(k)] = y_corrected[clean[k]];
  }
  return least_squares_on_support(rows, rhs, support);
}

}  // namespace

void DescentConfig::validate() const {
  if (max_altmin_iters < 1) throw InvalidArgument("DescentConfig: max_altmin_iters must be at least 1");
  if (!(exact_tol > 0.0)) throw InvalidArgument("DescentConfig: exact_tol must be positive");
  solver.validate();
}

BinIndexVector update_bin_indices(const MeasurementEnsemble& a, const SparseSignal& x) {
  return true_bin_indices(a, x);
}

DescentResult moram_descent(const ModuloObservation& obs, const MeasurementEnsemble& a, Index s,
                            const DescentConfig& cfg, const SparseSignal& x0) {
  cfg.validate();
  if (obs.size() != a.rows()) throw DimensionMismatch("moram_descent: observation length differs from m");
  if (x0.size() != a.cols()) throw DimensionMismatch("moram_descent: x0 length differs from n");
  if (s < 1 || s > a.cols()) throw InvalidArgument("moram_descent: need 1 <= s <= n");

  using Clock = std::chrono::steady_clock;
  const Matrix& am = a.entries();
  const JusticePursuit solver(a, cfg.solver);

  Vector x = hard_threshold(x0.values(), s);
  BinIndexVector bins = true_bin_indices(a, x);
  DescentTrace trace;
  for (int t = 0; t < cfg.max_altmin_iters; ++t) {
    const auto start = Clock::now();
    const Vector y_c = correct_measurements(obs, bins);
    const JusticePursuitResult jp = solver.solve(y_c, x);
    Vector next = polish(am, y_c, jp, s, obs.range_r());

    const Vector linear = am * next;
    const double scale = y_c.norm();
    const double residual = (linear - y_c).norm() / (scale > 0.0 ? scale : 1.0);
    BinIndexVector next_bins = bins_of(linear);

    IterationRecord rec;
    rec.bin_flips = next_bins.count_differences(bins);
    rec.relative_residual = residual;
    rec.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    trace.iterations.push_back(rec);

    x = std::move(next);
    bins = std::move(next_bins);
    if (rec.bin_flips == 0 && residual <= cfg.exact_tol) {
      trace.converged = true;
      break;
    }
  }
  return DescentResult{SparseSignal(std::move(x), s), std::move(trace)};
}

}  // namespace moram
