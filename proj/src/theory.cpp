#include "moram/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace moram {

namespace {

constexpr double kUnitTol = 1e-9;

void require_unit(const Vector& v, const char* who) {
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    throw InvalidArgument(std::string(who) + ": input must have unit Euclidean norm");
  }
}

}  // namespace

std::vector<int> sign_vector(const Vector& v) {
  std::vector<int> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v[i] >= 0.0 ? 1 : -1;
  return out;
}

double hamming_distance(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionMismatch("hamming_distance: length mismatch");
  if (a.empty()) throw InvalidArgument("hamming_distance: vectors must be non-empty");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double hamming_distance(const BinIndexVector& a, const BinIndexVector& b) {
  if (a.size() == 0) throw InvalidArgument("hamming_distance: vectors must be non-empty");
  return static_cast<double>(a.count_differences(b)) / static_cast<double>(a.size());
}

double angular_distance(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw DimensionMismatch("angular_distance: length mismatch");
  require_unit(p, "angular_distance");
  require_unit(q, "angular_distance");
  const double c = std::clamp(p.dot(q), -1.0, 1.0);
  return std::acos(c) / std::numbers::pi;
}

std::int64_t required_measurements(Index s, Index n, double epsilon, double eta) {
  if (s < 1 || n < s) throw InvalidArgument("required_measurements: need 1 <= s <= n");
  if (!(epsilon > 0.0)) throw InvalidArgument("required_measurements: epsilon must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("required_measurements: eta must lie in (0, 1]");
  const double sd = static_cast<double>(s);
  const double bound = 2.0 / (epsilon * epsilon) *
                       (sd * std::log(static_cast<double>(n)) + 2.0 * sd * std::log(35.0 / epsilon) +
                        std::log(2.0 / eta));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(bound)));
}

BeseBudget BeseBudget::make(Index s, Index n, double epsilon, double eta) {
  return BeseBudget{s, n, epsilon, eta, required_measurements(s, n, epsilon, eta)};
}

SandwichTriple sandwich_check(const Vector& p, const Vector& q) {
  const double ds = angular_distance(p, q);
  return SandwichTriple{2.0 * ds, (p - q).norm(), std::numbers::pi * ds};
}

double empirical_bese(const MeasurementEnsemble& a, const Vector& x_star, const Vector& x0) {
  if (x_star.size() != a.cols() || x0.size() != a.cols()) {
    throw DimensionMismatch("empirical_bese: signal length differs from n");
  }
  const auto lhs = sign_vector(a.entries() * x_star);
  const auto rhs = sign_vector(a.entries() * x0);
  return hamming_distance(lhs, rhs);
}

}  // namespace moram
