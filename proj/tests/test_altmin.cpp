#include <doctest.h>

#include "moram/altmin.hpp"
#include "moram/init.hpp"
#include "moram/model.hpp"

#include <cmath>
#include <vector>

using namespace moram;

namespace {

struct Problem {
  MeasurementEnsemble a;
  SparseSignal x;
  ModuloObservation obs;
};

Problem make_problem(Index n, Index s, Index m, double r, std::uint64_t seed) {
  auto a = gaussian_matrix(m, n, derive_seed({seed, 1}));
  auto x = random_sparse_signal(n, s, derive_seed({seed, 2}), true);
  auto obs = forward(a, x, r);
  return {std::move(a), std::move(x), std::move(obs)};
}

bool consistent(const MeasurementEnsemble& a, const Vector& x, const ModuloObservation& obs, double tol) {
  const Vector y = forward(a, x, obs.range_r()).y();
  return (y - obs.y()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("update_bin_indices follows the sign of A x") {
  Matrix am(3, 2);
  am << 1.0, 0.0,
        -1.0, 0.0,
        0.0, 1.0;
  const MeasurementEnsemble a(am);
  Vector v(2);
  v << 2.0, 0.0;
  const auto bins = update_bin_indices(a, SparseSignal(v, 1));
  CHECK(bins == BinIndexVector({0, 1, 0}));  // third row is exactly 0

  // A tiny negative margin still counts as negative.
  Vector w(2);
  w << 0.0, -1e-300;
  CHECK(update_bin_indices(a, SparseSignal(w, 1)) == BinIndexVector({0, 0, 1}));
}

TEST_CASE("zero signal converges in one iteration") {
  const auto a = gaussian_matrix(30, 40, 3);
  const SparseSignal zero = SparseSignal::zeros(40, 2);
  const auto obs = forward(a, zero, 4.0);
  const auto res = moram_descent(obs, a, 2, {}, zero);
  CHECK(res.trace.converged);
  CHECK(res.trace.size() == 1);
  CHECK(res.x.values() == Vector::Zero(40));
  CHECK(res.trace.iterations[0].bin_flips == 0);
}

TEST_CASE("descent recovers s = 3 signals at m = 800") {
  double total = 0.0;
  int used = 0;
  for (std::uint64_t seed = 0; used < 10; ++seed) {
    REQUIRE(seed < 30);
    const auto p = make_problem(1000, 3, 800, 4.0, seed);
    if (!p.obs.within_range()) continue;
    ++used;
    const auto x0 = moram_initialize(p.obs, p.a, 3);
    const auto res = moram_descent(p.obs, p.a, 3, {}, x0);
    const double err = relative_error(res.x.values(), p.x.values());
    total += err;
    CHECK(res.x.nonzeros() <= 3);
    if (res.trace.converged) {
      CHECK(res.trace.iterations.back().bin_flips == 0);
      CHECK(res.trace.iterations.back().relative_residual <= 1e-6);
    }
  }
  CHECK(total / 10.0 < 1e-4);
}

TEST_CASE("one step from the true bins lands on the truth") {
  const auto p = make_problem(300, 4, 200, 4.0, 77);
  // Starting at x* gives correct bins, so y_c = A x* and the first solve is clean.
  const auto res = moram_descent(p.obs, p.a, 4, {}, p.x);
  CHECK(res.trace.converged);
  CHECK(res.trace.size() == 1);
  CHECK(relative_error(res.x.values(), p.x.values()) < 1e-8);
}

TEST_CASE("descent output agrees with an exhaustive small-scale oracle") {
  // n = 10, s = 1, m = 8: enumerate all 10 supports and 2^8 bin patterns,
  // fit the single coefficient by least squares, and keep the fits that
  // reproduce every observation.
  const Index n = 10;
  const Index m = 8;
  const double r = 6.0;
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = make_problem(n, 1, m, r, seed + 500);
    REQUIRE(p.obs.within_range());

    std::vector<Vector> oracle;
    for (Index j = 0; j < n; ++j) {
      const Vector col = p.a.entries().col(j);
      for (unsigned pattern = 0; pattern < (1u << m); ++pattern) {
        Vector yc = p.obs.y();
        for (Index i = 0; i < m; ++i) {
          if (pattern & (1u << i)) yc[i] -= r;
        }
        Vector cand = Vector::Zero(n);
        cand[j] = col.dot(yc) / col.squaredNorm();
        if (consistent(p.a, cand, p.obs, 1e-9)) oracle.push_back(cand);
      }
    }
    bool has_truth = false;
    for (const auto& c : oracle) has_truth |= (c - p.x.values()).norm() < 1e-9;
    CHECK(has_truth);

    const auto x0 = moram_initialize(p.obs, p.a, 1);
    const auto res = moram_descent(p.obs, p.a, 1, {}, x0);
    CHECK(res.x.nonzeros() <= 1);
    if (res.trace.converged) {
      ++converged;
      bool matched = false;
      for (const auto& c : oracle) matched |= (c - res.x.values()).norm() < 1e-6;
      CHECK(matched);
    }
  }
  CHECK(converged > 0);
}

TEST_CASE("descent argument validation") {
  const auto p = make_problem(50, 2, 30, 4.0, 1);
  const auto x0 = SparseSignal::zeros(50, 2);
  DescentConfig bad;
  bad.max_altmin_iters = 0;
  CHECK_THROWS_AS(moram_descent(p.obs, p.a, 2, bad, x0), InvalidArgument);
  bad = {};
  bad.exact_tol = 0.0;
  CHECK_THROWS_AS(moram_descent(p.obs, p.a, 2, bad, x0), InvalidArgument);
  CHECK_THROWS_AS(moram_descent(p.obs, p.a, 0, {}, x0), InvalidArgument);
  CHECK_THROWS_AS(moram_descent(p.obs, p.a, 2, {}, SparseSignal::zeros(49, 2)), DimensionMismatch);
  const auto other = gaussian_matrix(31, 50, 2);
  CHECK_THROWS_AS(moram_descent(p.obs, other, 2, {}, x0), DimensionMismatch);
}

TEST_CASE("trace respects the iteration budget") {
  const auto p = make_problem(200, 6, 40, 4.0, 9);
  DescentConfig cfg;
  cfg.max_altmin_iters = 3;
  const auto res = moram_descent(p.obs, p.a, 6, cfg, moram_initialize(p.obs, p.a, 6));
  CHECK(res.trace.size() <= 3);
  CHECK(res.x.nonzeros() <= 6);
  for (const auto& it : res.trace.iterations) {
    CHECK(it.bin_flips >= 0);
    CHECK(it.bin_flips <= 40);
    CHECK(it.wall_time.count() >= 0);
  }
}
