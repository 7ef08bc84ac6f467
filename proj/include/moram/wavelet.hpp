#ifndef MORAM_WAVELET_HPP
#define MORAM_WAVELET_HPP

#include "moram/core.hpp"

#include <filesystem>

namespace moram {

class ImageFormatError : public Error {
 public:
  using Error::Error;
};

// Full-depth orthonormal 2D Haar transform of a square power-of-two image.
// Each level filters rows, then columns, of the current low-pass block; the
// approximation coefficient ends up at (0, 0).
Matrix haar2_forward(const Matrix& img);
Matrix haar2_inverse(const Matrix& coeffs);

struct SparsifiedImage {
  // Row-major flattening of the kept Haar coefficients.
  Vector coefficients;
  // Inverse transform of the kept coefficients.
  Matrix reference;
};

SparsifiedImage sparsify(const Matrix& img, Index s);

// Flattening helpers between an image-shaped matrix and a signal vector.
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, Index rows, Index cols);

// 10 log10(peak^2 / MSE) in dB; +infinity when the images are identical.
double psnr(const Matrix& ref, const Matrix& test, double peak);

// Binary 8-bit PGM. Pixels load as value / maxval in [0, 1]; writing clamps
// to [0, 1] and rounds to 0..255.
Matrix read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Matrix& img);

}  // namespace moram

#endif  // MORAM_WAVELET_HPP
