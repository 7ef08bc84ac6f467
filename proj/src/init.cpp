#include "moram/init.hpp"

#include <sstream>

namespace moram {

BinIndexVector ml_bin_indices(const ModuloObservation& obs) {
  const double r = obs.range_r();
  const double half = 0.5 * r;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(obs.size()));
  for (Index i = 0; i < obs.size(); ++i) {
    const double yi = obs.y()[i];
    if (!(yi >= 0.0 && yi <= r)) {
      std::ostringstream msg;
      msg << "ml_bin_indices: y[" << i << "] = " << yi << " outside [0, " << r << "]";
      throw ObservationOutOfRange(msg.str());
    }
    bits[static_cast<std::size_t>(i)] = yi < half ? 0 : 1;
  }
  return BinIndexVector(std::move(bits));
}

Vector correct_measurements(const ModuloObservation& obs, const BinIndexVector& bins) {
  if (bins.size() != obs.size()) {
    throw DimensionMismatch("correct_measurements: bin vector length differs from observation");
  }
  return obs.y() - obs.range_r() * bins.as_real();
}

Vector backprojection(const MeasurementEnsemble& a, const Vector& y_corrected) {
  if (y_corrected.size() != a.rows()) {
    std::ostringstream msg;
    msg << "backprojection: matrix has " << a.rows() << " rows but measurements have length "
        << y_corrected.size();
    throw DimensionMismatch(msg.str());
  }
  return a.entries().transpose() * y_corrected / static_cast<double>(a.rows());
}

SparseSignal initial_estimate(const MeasurementEnsemble& a, const Vector& y_corrected, Index s) {
  if (s < 1 || s > a.cols()) {
    throw InvalidArgument("initial_estimate: need 1 <= s <= n");
  }
  return SparseSignal(hard_threshold(backprojection(a, y_corrected), s), s);
}

SparseSignal moram_initialize(const ModuloObservation& obs, const MeasurementEnsemble& a, Index s) {
  const BinIndexVector bins = ml_bin_indices(obs);
  return initial_estimate(a, correct_measurements(obs, bins), s);
}

}  // namespace moram
