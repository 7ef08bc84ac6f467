#ifndef MORAM_MODEL_HPP
#define MORAM_MODEL_HPP

#include "moram/core.hpp"

#include <vector>

namespace moram {

// Raised by a strict forward pass when some |<a_i, x>| > R.
class DynamicRangeViolation : public Error {
 public:
  DynamicRangeViolation(const std::string& what, std::vector<Index> indices)
      : Error(what), indices_(std::move(indices)) {}

  const std::vector<Index>& indices() const { return indices_; }

 private:
  std::vector<Index> indices_;
};

// Two-period wrap: t for t >= 0, t + R for t < 0 (sgn(0) = +1).
double mod_two_period(double t, double range_r);

// y_i = mod_two_period(<a_i, x>, R). With strict set, any |<a_i, x>| > R
// raises DynamicRangeViolation naming every offending row.
ModuloObservation forward(const MeasurementEnsemble& a, const SparseSignal& x, double range_r,
                          bool strict = false);
ModuloObservation forward(const MeasurementEnsemble& a, const Vector& x, double range_r,
                          bool strict = false);

// p_i = 0 when <a_i, x> >= 0, else 1.
BinIndexVector true_bin_indices(const MeasurementEnsemble& a, const SparseSignal& x);
BinIndexVector true_bin_indices(const MeasurementEnsemble& a, const Vector& x);

// Bins of already-computed linear measurements.
BinIndexVector bins_of(const Vector& linear);

}  // namespace moram

#endif  // MORAM_MODEL_HPP
