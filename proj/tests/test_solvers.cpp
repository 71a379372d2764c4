#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "binsense/operators.hpp"
#include "binsense/rng.hpp"
#include "binsense/solvers.hpp"

using binsense::Vec;
namespace ops = binsense::ops;
namespace rng = binsense::rng;
namespace solvers = binsense::solvers;

namespace {

double dist_l2(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d);
}

// Operator whose selected rows read coordinates directly: identity circulant
// generator, no bias, all rows kept. Then A x = x and every program's unique
// solution is x0 itself.
ops::Operator coordinate_reader(std::size_t n) {
  Vec b(n, 0.0);
  b[0] = 1.0;
  std::vector<std::size_t> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = i;
  return ops::make_circulant(b, theta, 0.0);
}

} // namespace

TEST_CASE("all programs recover a signal read off coordinate by coordinate") {
  const std::size_t n = 12;
  const ops::Operator op = coordinate_reader(n);
  rng::Stream s(rng::derive_key(31, "solver-identity"));
  const rng::BinarySignal x0 = rng::sample_binary_signal(n, 5, s);
  const Vec y = op.apply(x0.dense());

  const auto bp = solvers::solve_box_bp(op, y);
  REQUIRE(bp.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(bp.x_star, x0.dense()) <= 1e-8);
  CHECK(bp.objective == doctest::Approx(5.0).epsilon(1e-9));

  const auto bpp = solvers::solve_nonneg_bp(op, y);
  REQUIRE(bpp.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(bpp.x_star, x0.dense()) <= 1e-8);

  const auto ls = solvers::solve_box_ls(op, y);
  REQUIRE(ls.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(ls.x_star, x0.dense()) <= 1e-6);
  CHECK(ls.objective <= 1e-12);
}

TEST_CASE("a well-conditioned biased instance is recovered by every program") {
  const std::size_t n = 32, m = 24, sp = 3;
  rng::Stream gs(rng::derive_key(32, "solver-gen"));
  rng::Stream ss(rng::derive_key(32, "solver-sel"));
  rng::Stream xs(rng::derive_key(32, "solver-sig"));
  const Vec b = rng::sample_generator(rng::EnsembleSpec::gaussian(1.0), n, gs);
  const std::vector<std::size_t> theta = rng::sample_selection(n, m, ss);
  const ops::Operator op = ops::make_circulant(b, theta, 1.0, 1.0);
  const rng::BinarySignal x0 = rng::sample_binary_signal(n, sp, xs);
  const Vec y = op.apply(x0.dense());

  const auto bp = solvers::solve_box_bp(op, y);
  REQUIRE(bp.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(bp.x_star, x0.dense()) <= 1e-6);
  CHECK(bp.residual_l2 <= 1e-7);
  CHECK(bp.duality_gap <= 1e-6);

  const auto bpp = solvers::solve_nonneg_bp(op, y);
  REQUIRE(bpp.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(bpp.x_star, x0.dense()) <= 1e-6);

  solvers::SolverOptions lsopts;
  lsopts.tolerance_opt = 1e-12;
  lsopts.max_iterations = 200000;
  const auto ls = solvers::solve_box_ls(op, y, lsopts);
  REQUIRE(ls.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(ls.x_star, x0.dense()) <= 1e-5);
}

TEST_CASE("box least squares matches measurements it cannot fit exactly") {
  // One row, two columns: A = [1 1] with mu = 0. y = 3 is unreachable in the
  // box; the projected optimum saturates both coordinates at 1.
  const ops::Operator op = ops::make_circulant({1.0, 1.0}, {0}, 0.0);
  const auto out = solvers::solve_box_ls(op, {3.0});
  REQUIRE(out.status == solvers::SolveStatus::optimal);
  CHECK(out.x_star[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(out.x_star[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(out.objective == doctest::Approx(1.0).epsilon(1e-7));  // (2 - 3)^2
}

TEST_CASE("infeasible equality programs report infeasibility") {
  const ops::Operator op = ops::make_circulant({1.0, 0.0}, {0}, 0.0);
  // A x = x0 + 0*x1 restricted to [0,1]: y = 5 unreachable.
  const auto bp = solvers::solve_box_bp(op, {5.0});
  CHECK(bp.status == solvers::SolveStatus::infeasible);
  // Nonnegative version reaches it fine.
  const auto bpp = solvers::solve_nonneg_bp(op, {5.0});
  REQUIRE(bpp.status == solvers::SolveStatus::optimal);
  CHECK(bpp.x_star[0] == doctest::Approx(5.0));
}

TEST_CASE("rounding thresholds at one half and checks consistency") {
  const std::size_t n = 6;
  const ops::Operator op = coordinate_reader(n);
  const Vec x = {0.2, 0.5, 0.500001, 0.99, 0.0, 1.0};
  const Vec y = {0.0, 0.0, 1.0, 1.0, 0.0, 1.0};
  const auto r = solvers::round_to_binary(x, op, y);
  CHECK(r.signal.n == n);
  CHECK(r.signal.support == std::vector<std::size_t>{2, 3, 5});
  CHECK(r.consistent);
  CHECK(r.residual_l2 <= 1e-12);

  // Same rounding against measurements it does not reproduce.
  const Vec y2 = {1.0, 0.0, 1.0, 1.0, 0.0, 1.0};
  const auto r2 = solvers::round_to_binary(x, op, y2);
  CHECK(r2.signal.support == std::vector<std::size_t>{2, 3, 5});
  CHECK_FALSE(r2.consistent);
  CHECK(r2.residual_l2 == doctest::Approx(1.0));
}

TEST_CASE("box least squares survives a misjudged curvature estimate") {
  // Square biased circulant whose top curvature sits in an oscillatory mode
  // that power iteration approaches slowly. Without step backtracking the
  // projected iteration overshoots and cycles without converging.
  const Vec b = {0.23090703183388608, -1.6034848805322444, -0.53070091770916106,
                 -1.8302987026233057, -0.42981444286450127, -0.48482574054438637,
                 -0.38063987983319769, -2.0999402067655848, 0.56574985050467619,
                 -0.074498627894248465};
  const ops::Operator op =
      ops::make_circulant(b, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 1.0, 1.0);
  rng::BinarySignal x0;
  x0.n = 10;
  x0.support = {0, 1, 3, 5, 6, 7};
  const Vec y = op.apply(x0.dense());
  const auto out = solvers::solve_box_ls(op, y);
  REQUIRE(out.status == solvers::SolveStatus::optimal);
  CHECK(dist_l2(out.x_star, x0.dense()) <= 1e-6);
  CHECK(out.iterations <= 50000);
}

TEST_CASE("projected gradient reports its fixed-point residual") {
  rng::Stream s(rng::derive_key(33, "pgd-resid"));
  const std::size_t n = 20, m = 14;
  const Vec b = rng::sample_generator(rng::EnsembleSpec::gaussian(1.0), n, s);
  const std::vector<std::size_t> theta = rng::sample_selection(n, m, s);
  const ops::Operator op = ops::make_circulant(b, theta, 1.0, 1.0);
  rng::Stream xs(rng::derive_key(33, "pgd-sig"));
  const rng::BinarySignal x0 = rng::sample_binary_signal(n, 4, xs);
  const Vec y = op.apply(x0.dense());
  const auto out = solvers::solve_box_ls(op, y);
  REQUIRE(out.status == solvers::SolveStatus::optimal);
  CHECK(out.duality_gap >= 0.0);
  CHECK(out.duality_gap <= 1e-6);
  CHECK(out.iterations >= 1);
}
