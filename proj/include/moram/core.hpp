#ifndef MORAM_CORE_HPP
#define MORAM_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace moram {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

// SplitMix64 stream. Every draw is a pure function of (seed, draw count), so
// results are reproducible bit-for-bit across platforms, unlike the
// implementation-defined std:: distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform on (0, 1].
  double uniform();
  // Standard normal via Box-Muller, caching the second variate.
  double normal();
  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

// Finalizer of SplitMix64, usable as a 64-bit hash.
std::uint64_t mix64(std::uint64_t x);

// Combines several words into one seed; order-sensitive.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words);

// Vector with at most `sparsity_budget` nonzero entries.
class SparseSignal {
 public:
  SparseSignal(Vector values, Index sparsity_budget);

  static SparseSignal zeros(Index n, Index sparsity_budget);

  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  Index sparsity_budget() const { return sparsity_budget_; }
  Index nonzeros() const;
  std::vector<Index> support() const;

 private:
  Vector values_;
  Index sparsity_budget_;
};

// Dense m x n measurement matrix. Matrices drawn by gaussian_matrix() carry
// their seed; hand-built ones do not.
class MeasurementEnsemble {
 public:
  explicit MeasurementEnsemble(Matrix entries, std::optional<std::uint64_t> seed = std::nullopt);

  const Matrix& entries() const { return entries_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  Matrix entries_;
  std::optional<std::uint64_t> seed_;
};

// Binary label per measurement: 1 when the wrap added R, 0 otherwise.
class BinIndexVector {
 public:
  BinIndexVector() = default;
  explicit BinIndexVector(std::vector<std::uint8_t> bits);

  static BinIndexVector zeros(Index m);

  Index size() const { return static_cast<Index>(bits_.size()); }
  std::uint8_t operator[](Index i) const { return bits_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // Number of positions where the two vectors disagree.
  Index count_differences(const BinIndexVector& other) const;
  Vector as_real() const;

  friend bool operator==(const BinIndexVector&, const BinIndexVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Observed modulo measurements y together with the wrap period R.
//
// Under the dynamic-range assumption every y_i lies in [0, R]. Observations
// produced by a non-strict forward pass may break that; within_range() tells.
class ModuloObservation {
 public:
  ModuloObservation(Vector y, double range_r);

  const Vector& y() const { return y_; }
  double range_r() const { return range_r_; }
  Index size() const { return y_.size(); }
  bool within_range() const;

 private:
  Vector y_;
  double range_r_;
};

// Additive measurement corruption. A true bin-error correction has entries
// in {-R, 0, R}.
struct CorrectionVector {
  Vector d;

  Index nonzeros(double tol = 0.0) const;
};

MeasurementEnsemble gaussian_matrix(Index m, Index n, std::uint64_t seed);

SparseSignal random_sparse_signal(Index n, Index s, std::uint64_t seed, bool normalize);

// Keeps the s largest-magnitude entries. Ties at the cutoff keep the lower
// index. s >= v.size() returns v unchanged.
Vector hard_threshold(const Vector& v, Index s);

// Indices of the s largest-magnitude entries, same ordering rule as
// hard_threshold, returned in ascending index order.
std::vector<Index> largest_indices(const Vector& v, Index s);

// ||x_star - x_hat|| / ||x_star||.
double relative_error(const Vector& x_hat, const Vector& x_star);

}  // namespace moram

#endif  // MORAM_CORE_HPP
