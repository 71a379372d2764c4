#pragma once

#include <cstddef>

#include "binsense/mat.hpp"

namespace binsense::solvers {

struct SolverOptions {
  double tolerance_feas = 1e-8;
  double tolerance_opt = 1e-8;
  std::size_t max_iterations = 100000;
  // Recovery is declared successful when ||x - x0||_2 <= success_radius.
  double success_radius = 1e-4;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SolveStatus s);

struct SolverOutcome {
  Vec x_star;
  SolveStatus status = SolveStatus::iteration_limit;
  double objective = 0.0;
  double residual_l2 = 0.0;
  double duality_gap = 0.0;
  std::size_t iterations = 0;
};

// min c'x  s.t.  A x = b,  lower <= x <= upper.
//
// Bound entries may be +-infinity. Dense bounded-variable primal simplex:
// phase one on row-wise artificials, Dantzig pricing with a Bland fallback
// after a stall, bound-flip ratio test, and a final refactorization of the
// basis (dense LU) for clean primal/dual values.
SolverOutcome lp_solve(const Mat& a, const Vec& b, const Vec& c, const Vec& lower,
                       const Vec& upper, const SolverOptions& opts = {});

} // namespace binsense::solvers
