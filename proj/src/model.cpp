#include "moram/model.hpp"

#include <sstream>

namespace moram {

namespace {

void check_dims(const MeasurementEnsemble& a, const Vector& x, const char* who) {
  if (a.cols() != x.size()) {
    std::ostringstream msg;
    msg << who << ": matrix has " << a.cols() << " columns but signal has length " << x.size();
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace

double mod_two_period(double t, double range_r) { return t >= 0.0 ? t : t + range_r; }

ModuloObservation forward(const MeasurementEnsemble& a, const Vector& x, double range_r, bool strict) {
  if (!(range_r > 0.0)) throw InvalidArgument("forward: R must be positive");
  check_dims(a, x, "forward");
  const Vector linear = a.entries() * x;
  if (strict) {
    std::vector<Index> bad;
    for (Index i = 0; i < linear.size(); ++i) {
      if (std::abs(linear[i]) > range_r) bad.push_back(i);
    }
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "forward: " << bad.size() << " measurement(s) exceed the dynamic range R=" << range_r
          << " (first index " << bad.front() << ", value " << linear[bad.front()] << ")";
      throw DynamicRangeViolation(msg.str(), std::move(bad));
    }
  }
  Vector y(linear.size());
  for (Index i = 0; i < linear.size(); ++i) y[i] = mod_two_period(linear[i], range_r);
  return ModuloObservation(std::move(y), range_r);
}

ModuloObservation forward(const MeasurementEnsemble& a, const SparseSignal& x, double range_r, bool strict) {
  return forward(a, x.values(), range_r, strict);
}

BinIndexVector bins_of(const Vector& linear) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(linear.size()));
  for (Index i = 0; i < linear.size(); ++i) {
    bits[static_cast<std::size_t>(i)] = linear[i] < 0.0 ? 1 : 0;
  }
  return BinIndexVector(std::move(bits));
}

BinIndexVector true_bin_indices(const MeasurementEnsemble& a, const Vector& x) {
  check_dims(a, x, "true_bin_indices");
  return bins_of(a.entries() * x);
}

BinIndexVector true_bin_indices(const MeasurementEnsemble& a, const SparseSignal& x) {
  return true_bin_indices(a, x.values());
}

}  // namespace moram
