#include "moram/wavelet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace moram {

namespace {

void require_dyadic_square(const Matrix& m, const char* who) {
  const Index n = m.rows();
  if (n != m.cols() || n < 1 || (n & (n - 1)) != 0) {
    std::ostringstream msg;
    msg << who << ": expected a square power-of-two image, got " << m.rows() << "x" << m.cols();
    throw InvalidArgument(msg.str());
  }
}

// One analysis step on the first `len` entries of a strided line.
template <class Line>
void analyze(Line line, Index len, Vector& scratch) {
  const double h = std::numbers::sqrt2 / 2.0;
  const Index half = len / 2;
  for (Index k = 0; k < half; ++k) {
    scratch[k] = h * (line[2 * k] + line[2 * k + 1]);
    scratch[half + k] = h * (line[2 * k] - line[2 * k + 1]);
  }
  for (Index k = 0; k < len; ++k) line[k] = scratch[k];
}

template <class Line>
void synthesize(Line line, Index len, Vector& scratch) {
  const double h = std::numbers::sqrt2 / 2.0;
  const Index half = len / 2;
  for (Index k = 0; k < half; ++k) {
    scratch[2 * k] = h * (line[k] + line[half + k]);
    scratch[2 * k + 1] = h * (line[k] - line[half + k]);
  }
  for (Index k = 0; k < len; ++k) line[k] = scratch[k];
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  // The single delimiter after maxval is consumed here too.
  if (c == '#') in.unget();
  return tok;
}

long parse_positive(const std::string& tok, const char* field) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ImageFormatError(std::string("PGM: invalid ") + field + " '" + tok + "'");
  }
}

}  // namespace

Matrix haar2_forward(const Matrix& img) {
  require_dyadic_square(img, "haar2_forward");
  Matrix out = img;
  Vector scratch(img.rows());
  for (Index len = img.rows(); len >= 2; len /= 2) {
    for (Index i = 0; i < len; ++i) analyze(out.row(i), len, scratch);
    for (Index j = 0; j < len; ++j) analyze(out.col(j), len, scratch);
  }
  return out;
}

Matrix haar2_inverse(const Matrix& coeffs) {
  require_dyadic_square(coeffs, "haar2_inverse");
  Matrix out = coeffs;
  Vector scratch(coeffs.rows());
  for (Index len = 2; len <= coeffs.rows(); len *= 2) {
    for (Index j = 0; j < len; ++j) synthesize(out.col(j), len, scratch);
    for (Index i = 0; i < len; ++i) synthesize(out.row(i), len, scratch);
  }
  return out;
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unflatten: size does not match shape");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

SparsifiedImage sparsify(const Matrix& img, Index s) {
  if (s < 1) throw InvalidArgument("sparsify: s must be at least 1");
  const Matrix coeffs = haar2_forward(img);
  SparsifiedImage out;
  out.coefficients = hard_threshold(flatten(coeffs), s);
  out.reference = haar2_inverse(unflatten(out.coefficients, img.rows(), img.cols()));
  return out;
}

double psnr(const Matrix& ref, const Matrix& test, double peak) {
  if (ref.rows() != test.rows() || ref.cols() != test.cols()) {
    throw DimensionMismatch("psnr: image shapes differ");
  }
  if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be positive");
  const double mse = (ref - test).squaredNorm() / static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

Matrix read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageFormatError("PGM: cannot open " + path.string());
  if (next_token(in) != "P5") throw ImageFormatError("PGM: missing P5 magic in " + path.string());
  const long width = parse_positive(next_token(in), "width");
  const long height = parse_positive(next_token(in), "height");
  const long maxval = parse_positive(next_token(in), "maxval");
  if (maxval > 255) throw ImageFormatError("PGM: only 8-bit images (maxval <= 255) are supported");

  std::string payload(static_cast<std::size_t>(width * height), '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    throw ImageFormatError("PGM: truncated pixel data in " + path.string());
  }
  Matrix img(height, width);
  for (long i = 0; i < height; ++i) {
    for (long j = 0; j < width; ++j) {
      const auto byte = static_cast<unsigned char>(payload[static_cast<std::size_t>(i * width + j)]);
      if (byte > maxval) throw ImageFormatError("PGM: pixel value exceeds maxval");
      img(i, j) = static_cast<double>(byte) / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Matrix& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageFormatError("PGM: cannot write " + path.string());
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::string payload(static_cast<std::size_t>(img.size()), '\0');
  for (Index i = 0; i < img.rows(); ++i) {
    for (Index j = 0; j < img.cols(); ++j) {
      const double v = std::clamp(img(i, j), 0.0, 1.0);
      payload[static_cast<std::size_t>(i * img.cols() + j)] = static_cast<char>(std::lround(v * 255.0));
    }
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw ImageFormatError("PGM: write failed for " + path.string());
}

}  // namespace moram
