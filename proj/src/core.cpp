#include "moram/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace moram {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t w : words) {
    h = mix64(h + kGolden + w);
  }
  return h;
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() {
  // 53 random mantissa bits, shifted off zero so log() stays finite.
  return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) {
    throw InvalidArgument("SplitMix64::below: bound must be positive");
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = next();
  while (draw >= limit) {
    draw = next();
  }
  return draw % bound;
}

SparseSignal::SparseSignal(Vector values, Index sparsity_budget)
    : values_(std::move(values)), sparsity_budget_(sparsity_budget) {
  if (values_.size() < 1) {
    throw InvalidArgument("SparseSignal: dimension must be at least 1");
  }
  if (sparsity_budget_ < 1 || sparsity_budget_ > values_.size()) {
    throw InvalidArgument("SparseSignal: sparsity budget must lie in [1, n]");
  }
  if (nonzeros() > sparsity_budget_) {
    std::ostringstream msg;
    msg << "SparseSignal: " << nonzeros() << " nonzeros exceed budget " << sparsity_budget_;
    throw InvalidArgument(msg.str());
  }
}

SparseSignal SparseSignal::zeros(Index n, Index sparsity_budget) {
  return SparseSignal(Vector::Zero(n), sparsity_budget);
}

Index SparseSignal::nonzeros() const { return (values_.array() != 0.0).count(); }

std::vector<Index> SparseSignal::support() const {
  std::vector<Index> idx;
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0) idx.push_back(i);
  }
  return idx;
}

MeasurementEnsemble::MeasurementEnsemble(Matrix entries, std::optional<std::uint64_t> seed)
    : entries_(std::move(entries)), seed_(seed) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw InvalidArgument("MeasurementEnsemble: matrix must be at least 1x1");
  }
}

BinIndexVector::BinIndexVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::uint8_t b : bits_) {
    if (b > 1) throw InvalidArgument("BinIndexVector: entries must be 0 or 1");
  }
}

BinIndexVector BinIndexVector::zeros(Index m) {
  return BinIndexVector(std::vector<std::uint8_t>(static_cast<std::size_t>(m), 0));
}

Index BinIndexVector::count_differences(const BinIndexVector& other) const {
  if (other.size() != size()) {
    throw DimensionMismatch("BinIndexVector: length mismatch");
  }
  Index count = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    count += bits_[i] != other.bits_[i];
  }
  return count;
}

Vector BinIndexVector::as_real() const {
  Vector v(size());
  for (Index i = 0; i < size(); ++i) v[i] = (*this)[i];
  return v;
}

ModuloObservation::ModuloObservation(Vector y, double range_r) : y_(std::move(y)), range_r_(range_r) {
  if (!(range_r_ > 0.0) || !std::isfinite(range_r_)) {
    throw InvalidArgument("ModuloObservation: R must be positive and finite");
  }
}

bool ModuloObservation::within_range() const {
  return (y_.array() >= 0.0).all() && (y_.array() <= range_r_).all();
}

Index CorrectionVector::nonzeros(double tol) const { return (d.array().abs() > tol).count(); }

MeasurementEnsemble gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw InvalidArgument("gaussian_matrix: dimensions must be positive");
  }
  SplitMix64 rng(seed);
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return MeasurementEnsemble(std::move(a), seed);
}

SparseSignal random_sparse_signal(Index n, Index s, std::uint64_t seed, bool normalize) {
  if (n < 1 || s < 1 || s > n) {
    throw InvalidArgument("random_sparse_signal: need 1 <= s <= n");
  }
  SplitMix64 rng(seed);
  // Partial Fisher-Yates picks a uniform s-subset.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index k = 0; k < s; ++k) {
    const auto j = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
  }
  Vector x = Vector::Zero(n);
  for (Index k = 0; k < s; ++k) {
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    x[perm[static_cast<std::size_t>(k)]] = v;
  }
  if (normalize) x /= x.norm();
  return SparseSignal(std::move(x), s);
}

std::vector<Index> largest_indices(const Vector& v, Index s) {
  const Index n = v.size();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (s >= n) return idx;
  if (s <= 0) return {};
  auto before = [&v](Index a, Index b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma > mb || (ma == mb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + s, idx.end(), before);
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector hard_threshold(const Vector& v, Index s) {
  if (s < 0) throw InvalidArgument("hard_threshold: s must be non-negative");
  if (s >= v.size()) return v;
  Vector out = Vector::Zero(v.size());
  for (Index i : largest_indices(v, s)) out[i] = v[i];
  return out;
}

double relative_error(const Vector& x_hat, const Vector& x_star) {
  if (x_hat.size() != x_star.size()) {
    throw DimensionMismatch("relative_error: length mismatch");
  }
  const double denom = x_star.norm();
  if (denom == 0.0) {
    throw DivisionByZero("relative_error: reference signal has zero norm");
  }
  return (x_star - x_hat).norm() / denom;
}

}  // namespace moram
