#ifndef MORAM_ALTMIN_HPP
#define MORAM_ALTMIN_HPP

#include "moram/core.hpp"
#include "moram/solvers.hpp"

#include <chrono>
#include <vector>

namespace moram {

struct DescentConfig {
  // Upper bound on alternating iterations (Justice Pursuit solves).
  int max_altmin_iters = 10;
  // Relative residual ||A x - y_c|| / ||y_c|| accepted as an exact fit.
  double exact_tol = 1e-6;
  L1SolverConfig solver;

  void validate() const;
};

struct IterationRecord {
  // Bins that changed between p^t and the bins of the new estimate x^{t+1}.
  Index bin_flips = 0;
  double relative_residual = 0.0;
  std::chrono::nanoseconds wall_time{0};
};

struct DescentTrace {
  std::vector<IterationRecord> iterations;
  // True when the bins reached a fixed point with an exact fit before the
  // iteration budget ran out.
  bool converged = false;

  Index size() const { return static_cast<Index>(iterations.size()); }
};

struct DescentResult {
  SparseSignal x;
  DescentTrace trace;
};

// p = (1 - sgn(A x)) / 2 for the current estimate.
BinIndexVector update_bin_indices(const MeasurementEnsemble& a, const SparseSignal& x);

// Alternates bin refresh and Justice Pursuit starting from x0.
//
// Each iteration corrects y with the current bins, solves Justice Pursuit
// warm-started at the current estimate, keeps the s largest entries and
// refits them by least squares on the rows Justice Pursuit left
// uncorrupted. Stops early once the refreshed bins match the bins used for
// the solve and the fit is exact to exact_tol.
DescentResult moram_descent(const ModuloObservation& obs, const MeasurementEnsemble& a, Index s,
                            const DescentConfig& cfg, const SparseSignal& x0);

}  // namespace moram

#endif  // MORAM_ALTMIN_HPP
