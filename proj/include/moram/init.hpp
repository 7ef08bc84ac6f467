#ifndef MORAM_INIT_HPP
#define MORAM_INIT_HPP

#include "moram/core.hpp"

namespace moram {

// Raised when an observation leaves [0, R].
class ObservationOutOfRange : public Error {
 public:
  using Error::Error;
};

// Midpoint rule: p_i = 0 for y_i in [0, R/2), 1 for y_i in [R/2, R].
BinIndexVector ml_bin_indices(const ModuloObservation& obs);

// y - R * p.
Vector correct_measurements(const ModuloObservation& obs, const BinIndexVector& bins);

// H_s((1/m) A^T y_c), the thresholded first-order estimate.
SparseSignal initial_estimate(const MeasurementEnsemble& a, const Vector& y_corrected, Index s);

// Un-thresholded (1/m) A^T y_c.
Vector backprojection(const MeasurementEnsemble& a, const Vector& y_corrected);

// Bin guess, correction and thresholded back-projection in sequence.
SparseSignal moram_initialize(const ModuloObservation& obs, const MeasurementEnsemble& a, Index s);

}  // namespace moram

#endif  // MORAM_INIT_HPP
