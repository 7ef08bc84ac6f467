#ifndef MORAM_THEORY_HPP
#define MORAM_THEORY_HPP

#include "moram/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace moram {

// sgn with sgn(0) = +1, applied elementwise.
std::vector<int> sign_vector(const Vector& v);

// Fraction of positions where a and b differ.
double hamming_distance(std::span<const int> a, std::span<const int> b);
double hamming_distance(const BinIndexVector& a, const BinIndexVector& b);

// arccos(<p, q>) / pi for unit vectors. Inputs whose norm differs from 1 by
// more than 1e-9 are rejected.
double angular_distance(const Vector& p, const Vector& q);

// Sign-embedding measurement budget
//   m >= (2 / eps^2) (s ln n + 2 s ln(35 / eps) + ln(2 / eta)),
// rounded up.
std::int64_t required_measurements(Index s, Index n, double epsilon, double eta);

struct BeseBudget {
  Index s = 0;
  Index n = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  std::int64_t m_required = 0;

  static BeseBudget make(Index s, Index n, double epsilon, double eta);
};

struct SandwichTriple {
  double lhs = 0.0;  // 2 d_S
  double mid = 0.0;  // ||p - q||
  double rhs = 0.0;  // pi d_S

  bool holds(double tol = 0.0) const { return lhs <= mid + tol && mid <= rhs + tol; }
};

SandwichTriple sandwich_check(const Vector& p, const Vector& q);

// d_H(sgn(A x_star), sgn(A x0)).
double empirical_bese(const MeasurementEnsemble& a, const Vector& x_star, const Vector& x0);

}  // namespace moram

#endif  // MORAM_THEORY_HPP
