#ifndef MORAM_SOLVERS_HPP
#define MORAM_SOLVERS_HPP

#include "moram/core.hpp"

#include <optional>

namespace moram {

// The row Gram matrix of the constraint operator could not be factorized.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// Parameters of the ADMM basis-pursuit solver.
//
// The equality-constrained step is a projection that does not depend on the
// penalty, so the penalty may be rebalanced between iterations at no cost;
// adaptive_penalty enables the usual primal/dual residual balancing.
struct L1SolverConfig {
  double penalty_rho = 1.0;
  double abs_tol = 1e-7;
  double rel_tol = 1e-7;
  int max_iters = 5000;
  // Over-relaxation factor, in (0, 2). 1 is plain ADMM.
  double relaxation = 1.6;
  bool adaptive_penalty = true;

  void validate() const;
};

struct BasisPursuitResult {
  Vector u;
  int iterations = 0;
  // ||Phi u - b||_2 of the returned iterate.
  double residual = 0.0;
  // False when max_iters ran out; u is then the last iterate.
  bool converged = false;
};

// min ||u||_1 subject to Phi u = b, by ADMM with a cached Cholesky factor of
// Phi Phi^T. Throws RankDeficient when Phi lacks full row rank.
BasisPursuitResult basis_pursuit(const Matrix& phi, const Vector& b, const L1SolverConfig& cfg = {},
                                 const std::optional<Vector>& warm = std::nullopt);

struct JusticePursuitResult {
  Vector x_hat;
  CorrectionVector d_hat;
  int iterations = 0;
  // ||Phi [x; d] - b||_2 with Phi = [A I]/sqrt(m), b = y_c/sqrt(m).
  double residual = 0.0;
  bool converged = false;
};

// Basis pursuit over the augmented system [A I] / sqrt(m), recovering a
// sparse signal together with a sparse measurement corruption.
//
// The factorization of (A A^T + I) / m is computed once in the constructor
// and reused by every solve() against the same matrix. The ensemble must
// outlive the solver.
class JusticePursuit {
 public:
  explicit JusticePursuit(const MeasurementEnsemble& a, L1SolverConfig cfg = {});

  // warm_x seeds the signal block; the corruption block always starts at 0.
  JusticePursuitResult solve(const Vector& y_corrected,
                             const std::optional<Vector>& warm_x = std::nullopt) const;

  const L1SolverConfig& config() const { return cfg_; }

 private:
  const MeasurementEnsemble& a_;
  L1SolverConfig cfg_;
  double scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> gram_;
};

JusticePursuitResult justice_pursuit(const MeasurementEnsemble& a, const Vector& y_corrected,
                                     const L1SolverConfig& cfg = {},
                                     const std::optional<SparseSignal>& warm_x = std::nullopt);

struct CosampResult {
  SparseSignal x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Compressive sampling matching pursuit: merge the 2s strongest residual
// correlations with the current support, least squares (QR) on the union,
// prune to s. Stops once ||y - Ax|| <= tol or after max_iters.
CosampResult cosamp(const MeasurementEnsemble& a, const Vector& y, Index s, int max_iters = 100,
                    double tol = 1e-10);

// Least-squares fit restricted to the given columns; other entries are 0.
Vector least_squares_on_support(const Matrix& a, const Vector& y, const std::vector<Index>& support);

}  // namespace moram

#endif  // MORAM_SOLVERS_HPP
