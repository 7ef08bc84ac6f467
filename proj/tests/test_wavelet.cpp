#include <doctest.h>

#include "moram/wavelet.hpp"
#include "support/synthetic_image.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

using namespace moram;

namespace {

Matrix random_image(Index side, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix img(side, side);
  for (Index i = 0; i < side; ++i) {
    for (Index j = 0; j < side; ++j) img(i, j) = rng.uniform();
  }
  return img;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "moram_wavelet_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("Haar of a constant image concentrates in the approximation") {
  const Matrix img = Matrix::Constant(8, 8, 0.75);
  const Matrix c = haar2_forward(img);
  // Orthonormal: the single approximation coefficient is side * value.
  CHECK(c(0, 0) == doctest::Approx(8.0 * 0.75));
  Matrix rest = c;
  rest(0, 0) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Haar on 2x2 matches the hand-computed butterfly") {
  Matrix img(2, 2);
  img << 1.0, 2.0,
         3.0, 4.0;
  const Matrix c = haar2_forward(img);
  // Rows -> [3, -1; 7, -1]/sqrt2, then columns -> [10, -2; -4, 0]/2.
  CHECK(c(0, 0) == doctest::Approx(5.0));
  CHECK(c(0, 1) == doctest::Approx(-1.0));
  CHECK(c(1, 0) == doctest::Approx(-2.0));
  CHECK(c(1, 1) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("Haar round trip and Parseval") {
  for (Index side : {1, 2, 4, 16, 64}) {
    const Matrix img = random_image(side, static_cast<std::uint64_t>(side));
    const Matrix c = haar2_forward(img);
    CHECK(c.norm() == doctest::Approx(img.norm()).epsilon(1e-12));
    CHECK((haar2_inverse(c) - img).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Haar rejects non-dyadic or non-square input") {
  CHECK_THROWS_AS(haar2_forward(Matrix::Zero(6, 6)), InvalidArgument);
  CHECK_THROWS_AS(haar2_forward(Matrix::Zero(4, 8)), InvalidArgument);
  CHECK_THROWS_AS(haar2_inverse(Matrix::Zero(12, 12)), InvalidArgument);
}

TEST_CASE("flatten is row-major and inverts unflatten") {
  Matrix m(2, 3);
  m << 1, 2, 3,
       4, 5, 6;
  const Vector v = flatten(m);
  CHECK(v[1] == 2.0);
  CHECK(v[3] == 4.0);
  CHECK(unflatten(v, 2, 3) == m);
  CHECK_THROWS_AS(unflatten(v, 4, 2), DimensionMismatch);
}

TEST_CASE("sparsify keeps the s largest coefficients") {
  const Matrix img = testing::synthetic_scene(32);
  const Matrix c = haar2_forward(img);
  for (Index s : {1, 10, 200, 1024}) {
    const auto sp = sparsify(img, s);
    CHECK(sp.coefficients.size() == 1024);
    CHECK((sp.coefficients.array() != 0.0).count() <= s);
    // Kept entries are copied exactly and dominate every dropped one.
    const Vector full = flatten(c);
    double kept_min = std::numeric_limits<double>::infinity();
    double dropped_max = 0.0;
    for (Index i = 0; i < full.size(); ++i) {
      if (sp.coefficients[i] != 0.0) {
        CHECK(sp.coefficients[i] == full[i]);
        kept_min = std::min(kept_min, std::abs(full[i]));
      } else {
        dropped_max = std::max(dropped_max, std::abs(full[i]));
      }
    }
    CHECK(dropped_max <= kept_min);
    CHECK((haar2_inverse(unflatten(sp.coefficients, 32, 32)) - sp.reference).norm() < 1e-12);
  }
  CHECK((sparsify(img, 1024).reference - img).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sparsify(img, 1).reference.isApproxToConstant(img.mean(), 1e-12));
  CHECK_THROWS_AS(sparsify(img, 0), InvalidArgument);
}

TEST_CASE("psnr examples") {
  const Matrix a = Matrix::Zero(4, 4);
  const Matrix b = Matrix::Constant(4, 4, 1.0);
  CHECK(std::isinf(psnr(a, a, 1.0)));
  CHECK(psnr(a, b, 255.0) == doctest::Approx(48.1308036).epsilon(1e-9));
  CHECK(psnr(a, Matrix::Constant(4, 4, 0.1), 1.0) == doctest::Approx(20.0));
  // Scale invariance between [0, 1] and 0..255 units.
  const Matrix img = random_image(8, 3);
  const Matrix noisy = img + 0.01 * random_image(8, 4);
  CHECK(psnr(img, noisy, 1.0) == doctest::Approx(psnr(255.0 * img, 255.0 * noisy, 255.0)));
  CHECK_THROWS_AS(psnr(a, Matrix::Zero(4, 5), 1.0), DimensionMismatch);
  CHECK_THROWS_AS(psnr(a, b, 0.0), InvalidArgument);
}

TEST_CASE("PGM round trip") {
  const Matrix img = testing::synthetic_scene(16);
  const auto path = scratch("round_trip.pgm");
  write_pgm(path, img);
  const Matrix back = read_pgm(path);
  CHECK(back.rows() == 16);
  CHECK(back.cols() == 16);
  // The scene is already 8-bit quantized, so the round trip is lossless.
  CHECK((back - img).cwiseAbs().maxCoeff() < 1e-12);

  std::ifstream in(path, std::ios::binary);
  std::string header(13, '\0');
  in.read(header.data(), 13);
  CHECK(header == "P5\n16 16\n255\n");
}

TEST_CASE("PGM writer clamps and rounds") {
  Matrix img(1, 4);
  img << -0.5, 0.5, 1.5, 100.0 / 255.0;
  const auto path = scratch("clamp.pgm");
  write_pgm(path, img);
  const Matrix back = read_pgm(path);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(back(0, 2) == 1.0);
  CHECK(back(0, 3) == doctest::Approx(100.0 / 255.0));
}

TEST_CASE("PGM reader handles comments and non-255 maxval") {
  const auto path = scratch("comments.pgm");
  std::string bytes = "P5 # magic\n# a full comment line\n3 2\n#another\n15\n";
  bytes += std::string{0, 5, 15, 15, 10, 0};
  write_bytes(path, bytes);
  const Matrix img = read_pgm(path);
  REQUIRE(img.rows() == 2);
  REQUIRE(img.cols() == 3);
  CHECK(img(0, 1) == doctest::Approx(5.0 / 15.0));
  CHECK(img(0, 2) == 1.0);
  CHECK(img(1, 1) == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("PGM reader rejects malformed files") {
  const auto path = scratch("bad.pgm");
  write_bytes(path, "P2\n2 2\n255\n1 2 3 4");
  CHECK_THROWS_AS(read_pgm(path), ImageFormatError);
  write_bytes(path, "P5\n2 x\n255\n");
  CHECK_THROWS_AS(read_pgm(path), ImageFormatError);
  write_bytes(path, "P5\n2 2\n65535\n");
  CHECK_THROWS_AS(read_pgm(path), ImageFormatError);
  write_bytes(path, "P5\n2 2\n255\nabc");
  CHECK_THROWS_AS(read_pgm(path), ImageFormatError);
  write_bytes(path, std::string("P5\n2 1\n10\n") + std::string{5, 11});
  CHECK_THROWS_AS(read_pgm(path), ImageFormatError);
  CHECK_THROWS_AS(read_pgm(scratch("does_not_exist.pgm")), ImageFormatError);
}
