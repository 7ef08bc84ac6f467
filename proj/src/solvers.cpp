#include "moram/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace moram {

namespace {

Vector soft_threshold(const Vector& v, double kappa) {
  return v.array().sign() * (v.array().abs() - kappa).max(0.0);
}

// Relative pivot size below which the Gram factor is treated as singular.
constexpr double kPivotFloor = 1e-13;

template <class Gram>
void check_factor(const Gram& llt, const char* who) {
  if (llt.info() != Eigen::Success) {
    throw RankDeficient(std::string(who) + ": row Gram matrix is not positive definite");
  }
  const Vector diag = llt.matrixLLT().diagonal();
  if (diag.minCoeff() <= kPivotFloor * diag.maxCoeff()) {
    throw RankDeficient(std::string(who) + ": constraint matrix is numerically rank deficient");
  }
}

struct AdmmOutcome {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

// Penalty rebalancing is periodic and stops after a fixed budget, after
// which rho is constant and the usual ADMM convergence guarantee applies.
constexpr int kAdaptEvery = 5;
constexpr int kAdaptIters = 500;

// Scaled-form ADMM for min ||u||_1 s.t. u in an affine set, given the
// Euclidean projection onto that set.
template <class Projector>
AdmmOutcome admm_l1(const Projector& project, Index q, const L1SolverConfig& cfg,
                    const std::optional<Vector>& warm) {
  Vector z = warm ? *warm : Vector::Zero(q);
  Vector u = Vector::Zero(q);
  Vector x(q);
  double rho = cfg.penalty_rho;
  const double alpha = cfg.relaxation;
  const double sqrt_q = std::sqrt(static_cast<double>(q));

  AdmmOutcome out;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    x = project(z - u);
    const Vector x_relaxed = alpha * x + (1.0 - alpha) * z;
    Vector z_next = soft_threshold(x_relaxed + u, 1.0 / rho);
    u += x_relaxed - z_next;

    const double r_norm = (x - z_next).norm();
    const double s_norm = rho * (z_next - z).norm();
    z.swap(z_next);

    const double eps_pri = sqrt_q * cfg.abs_tol + cfg.rel_tol * std::max(x.norm(), z.norm());
    const double eps_dual = sqrt_q * cfg.abs_tol + cfg.rel_tol * rho * u.norm();
    out.iterations = k;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      out.converged = true;
      break;
    }
    if (cfg.adaptive_penalty && k <= kAdaptIters && k % kAdaptEvery == 0) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        u /= 2.0;
      } else if (s_norm > 10.0 * r_norm) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }
  out.x = std::move(x);
  return out;
}

}  // namespace

void L1SolverConfig::validate() const {
  if (!(penalty_rho > 0.0)) throw InvalidArgument("L1SolverConfig: penalty_rho must be positive");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw InvalidArgument("L1SolverConfig: tolerances must be positive");
  }
  if (max_iters < 1) throw InvalidArgument("L1SolverConfig: max_iters must be at least 1");
  if (!(relaxation > 0.0 && relaxation < 2.0)) {
    throw InvalidArgument("L1SolverConfig: relaxation must lie in (0, 2)");
  }
}

BasisPursuitResult basis_pursuit(const Matrix& phi, const Vector& b, const L1SolverConfig& cfg,
                                 const std::optional<Vector>& warm) {
  cfg.validate();
  if (b.size() != phi.rows()) {
    throw DimensionMismatch("basis_pursuit: right-hand side length differs from row count");
  }
  if (warm && warm->size() != phi.cols()) {
    throw DimensionMismatch("basis_pursuit: warm start length differs from column count");
  }
  if (phi.rows() > phi.cols()) {
    throw RankDeficient("basis_pursuit: more rows than columns, cannot have full row rank");
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(phi.rows(), phi.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  check_factor(llt, "basis_pursuit");

  auto project = [&](const Vector& v) -> Vector {
    return v - phi.transpose() * llt.solve(phi * v - b);
  };
  AdmmOutcome run = admm_l1(project, phi.cols(), cfg, warm);

  BasisPursuitResult res;
  res.residual = (phi * run.x - b).norm();
  res.u = std::move(run.x);
  res.iterations = run.iterations;
  res.converged = run.converged;
  return res;
}

JusticePursuit::JusticePursuit(const MeasurementEnsemble& a, L1SolverConfig cfg) : a_(a), cfg_(cfg) {
  cfg_.validate();
  const Matrix& am = a_.entries();
  scale_ = 1.0 / std::sqrt(static_cast<double>(am.rows()));
  // Row Gram of [A/sqrt(m) I].
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(am.rows(), am.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(am, scale_ * scale_);
  gram_.compute(gram);
  check_factor(gram_, "justice_pursuit");
}

JusticePursuitResult JusticePursuit::solve(const Vector& y_corrected, const std::optional<Vector>& warm_x) const {
  const Matrix& am = a_.entries();
  const Index m = am.rows();
  const Index n = am.cols();
  if (y_corrected.size() != m) {
    std::ostringstream msg;
    msg << "justice_pursuit: expected " << m << " corrected measurements, got " << y_corrected.size();
    throw DimensionMismatch(msg.str());
  }
  std::optional<Vector> warm;
  if (warm_x) {
    if (warm_x->size() != n) throw DimensionMismatch("justice_pursuit: warm start length differs from n");
    warm = Vector::Zero(n + m);
    warm->head(n) = *warm_x;
  }

  // Unknowns are [x; d / sqrt(m)] so that every column of [A/sqrt(m) I] has
  // unit expected norm; the constraint reads A x + d = y_c.
  const Vector b = scale_ * y_corrected;
  auto project = [&](const Vector& v) -> Vector {
    const Vector w = gram_.solve(scale_ * (am * v.head(n)) + v.tail(m) - b);
    Vector out(n + m);
    out.head(n) = v.head(n) - scale_ * (am.transpose() * w);
    out.tail(m) = v.tail(m) - w;
    return out;
  };
  AdmmOutcome run = admm_l1(project, n + m, cfg_, warm);

  JusticePursuitResult res;
  res.x_hat = run.x.head(n);
  res.d_hat.d = run.x.tail(m) / scale_;
  res.iterations = run.iterations;
  res.converged = run.converged;
  res.residual = (scale_ * (am * res.x_hat) + run.x.tail(m) - b).norm();
  return res;
}

JusticePursuitResult justice_pursuit(const MeasurementEnsemble& a, const Vector& y_corrected,
                                     const L1SolverConfig& cfg, const std::optional<SparseSignal>& warm_x) {
  const JusticePursuit solver(a, cfg);
  return solver.solve(y_corrected, warm_x ? std::optional<Vector>(warm_x->values()) : std::nullopt);
}

Vector least_squares_on_support(const Matrix& a, const Vector& y, const std::vector<Index>& support) {
  Vector x = Vector::Zero(a.cols());
  if (support.empty()) return x;
  Eigen::MatrixXd sub(a.rows(), static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(support[k]);
  const Vector coef = sub.colPivHouseholderQr().solve(y);
  for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = coef[static_cast<Index>(k)];
  return x;
}

CosampResult cosamp(const MeasurementEnsemble& a, const Vector& y, Index s, int max_iters, double tol) {
  const Matrix& am = a.entries();
  const Index n = am.cols();
  if (s < 1 || s > n) throw InvalidArgument("cosamp: need 1 <= s <= n");
  if (y.size() != am.rows()) throw DimensionMismatch("cosamp: measurement length differs from row count");
  if (max_iters < 1) throw InvalidArgument("cosamp: max_iters must be at least 1");

  Vector x = Vector::Zero(n);
  std::vector<Index> support;
  Vector residual = y;
  double res_norm = residual.norm();
  int it = 0;
  bool converged = res_norm <= tol;
  while (!converged && it < max_iters) {
    ++it;
    const Vector proxy = am.transpose() * residual;
    std::vector<Index> merged = largest_indices(proxy, 2 * s);
    merged.insert(merged.end(), support.begin(), support.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    const Vector b = least_squares_on_support(am, y, merged);
    support = largest_indices(b, s);
    Vector next = Vector::Zero(n);
    for (Index i : support) next[i] = b[i];

    const Vector next_residual = y - am * next;
    const double next_norm = next_residual.norm();
    const bool stalled = next_norm >= res_norm;
    if (!stalled || it == 1) {
      x = std::move(next);
      residual = next_residual;
      res_norm = next_norm;
    }
    converged = res_norm <= tol;
    if (stalled) break;
  }
  return CosampResult{SparseSignal(std::move(x), s), it, res_norm, converged};
}

}  // namespace moram
