#pragma once

#include "binsense/lp.hpp"
#include "binsense/operators.hpp"
#include "binsense/rng.hpp"

namespace binsense::solvers {

// min sum(x)  s.t.  A x = y,  0 <= x <= 1.
SolverOutcome solve_box_bp(const ops::Operator& op, const Vec& y, const SolverOptions& opts = {});

// min sum(x)  s.t.  A x = y,  x >= 0.
SolverOutcome solve_nonneg_bp(const ops::Operator& op, const Vec& y,
                              const SolverOptions& opts = {});

// min ||A x - y||_2^2  s.t.  0 <= x <= 1, by projected gradient descent with
// momentum and gradient-based restart. The step is 1/L with L an upper bound
// on the largest eigenvalue of A^T A from power iteration; the outcome's
// objective field holds ||A x - y||_2^2 and duality_gap the final projected
// -gradient fixed-point residual.
SolverOutcome solve_box_ls(const ops::Operator& op, const Vec& y, const SolverOptions& opts = {});

struct RoundResult {
  rng::BinarySignal signal;
  bool consistent = false;
  double residual_l2 = 0.0;
};

// Componentwise threshold at 1/2 (exact halves round down); consistent is set
// when the rounded vector reproduces y to 10 * tolerance_feas * (1 + ||y||_2).
RoundResult round_to_binary(const Vec& x, const ops::Operator& op, const Vec& y,
                            const SolverOptions& opts = {});

} // namespace binsense::solvers
