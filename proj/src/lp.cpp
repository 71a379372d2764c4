#include "binsense/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "binsense/kernels.hpp"

namespace binsense::solvers {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr std::size_t kStallLimit = 50;

// Dense LU with partial pivoting; perm_[i] is the source row of pivoted row i.
class DenseLu {
 public:
  bool factor(Mat a) {
    const std::size_t m = a.rows;
    lu_ = std::move(a);
    perm_.resize(m);
    for (std::size_t i = 0; i < m; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      double best = std::fabs(lu_.at(k, k));
      for (std::size_t i = k + 1; i < m; ++i) {
        const double v = std::fabs(lu_.at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-13) return false;
      if (piv != k) {
        for (std::size_t j = 0; j < m; ++j) std::swap(lu_.at(k, j), lu_.at(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      const double inv = 1.0 / lu_.at(k, k);
      for (std::size_t i = k + 1; i < m; ++i) {
        const double f = lu_.at(i, k) * inv;
        lu_.at(i, k) = f;
        if (f != 0.0) kernels::axpy(-f, lu_.row(k) + k + 1, lu_.row(i) + k + 1, m - k - 1);
      }
    }
    return true;
  }

  // Solve B x = rhs where P B = L U.
  Vec solve(const Vec& rhs) const {
    const std::size_t m = lu_.rows;
    Vec x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 1; i < m; ++i) {
      double acc = x[i];
      for (std::size_t j = 0; j < i; ++j) acc -= lu_.at(i, j) * x[j];
      x[i] = acc;
    }
    for (std::size_t ii = m; ii-- > 0;) {
      double acc = x[ii];
      for (std::size_t j = ii + 1; j < m; ++j) acc -= lu_.at(ii, j) * x[j];
      x[ii] = acc / lu_.at(ii, ii);
    }
    return x;
  }

  // Solve B^T y = rhs.
  Vec solve_transpose(const Vec& rhs) const {
    const std::size_t m = lu_.rows;
    Vec z(rhs);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = z[i];
      for (std::size_t j = 0; j < i; ++j) acc -= lu_.at(j, i) * z[j];
      z[i] = acc / lu_.at(i, i);
    }
    for (std::size_t ii = m; ii-- > 0;) {
      double acc = z[ii];
      for (std::size_t j = ii + 1; j < m; ++j) acc -= lu_.at(j, ii) * z[j];
      z[ii] = acc;
    }
    Vec y(m);
    for (std::size_t i = 0; i < m; ++i) y[perm_[i]] = z[i];
    return y;
  }

 private:
  Mat lu_;
  std::vector<std::size_t> perm_;
};

enum class VarState : unsigned char { basic, at_lower, at_upper, free_nb };

class BoundedSimplex {
 public:
  BoundedSimplex(const Mat& a, const Vec& b, const Vec& c, const Vec& lower, const Vec& upper,
                 const SolverOptions& opts)
      : a_(a), b_(b), c_(c), opts_(opts), m_(a.rows), n_(a.cols), ntot_(a.cols + a.rows) {
    if (b.size() != m_ || c.size() != n_ || lower.size() != n_ || upper.size() != n_)
      throw std::invalid_argument("lp_solve: dimension mismatch");
    lo_ = lower;
    up_ = upper;
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isnan(lo_[j]) || std::isnan(up_[j]) || lo_[j] > up_[j])
        throw std::invalid_argument("lp_solve: invalid bounds");
    }
    lo_.resize(ntot_, 0.0);
    up_.resize(ntot_, kInf);
    feas_eps_ = opts.tolerance_feas * (1.0 + std::sqrt(kernels::nrm2sq(b.data(), b.size())));
    dtol_ = 1e-9 * (1.0 + kernels::max_abs(c.data(), c.size()));
  }

  SolverOutcome run() {
    init_tableau();
    run_phase(/*phase1=*/true);
    SolverOutcome out;
    // A phase-1 ray can only be numerical fuzz (the objective is bounded
    // below by zero); fall through to the feasibility verdict.
    if (iters_ >= opts_.max_iterations) return finish(out, SolveStatus::iteration_limit);
    if (obj_ > feas_eps_) return finish(out, SolveStatus::infeasible);
    drive_out_artificials();
    prepare_phase2();
    run_phase(/*phase1=*/false);
    if (unbounded_) return finish(out, SolveStatus::unbounded);
    if (iters_ >= opts_.max_iterations) return finish(out, SolveStatus::iteration_limit);
    return finish(out, SolveStatus::optimal);
  }

 private:
  double value_of(std::size_t j) const { return state_[j] == VarState::basic ? 0.0 : val_[j]; }

  void init_tableau() {
    tab_ = Mat(m_, ntot_);
    d_.assign(ntot_, 0.0);
    xb_.assign(m_, 0.0);
    basis_.resize(m_);
    state_.assign(ntot_, VarState::at_lower);
    val_.assign(ntot_, 0.0);
    allowed_.assign(ntot_, 1);

    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        state_[j] = VarState::at_lower;
        val_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        state_[j] = VarState::at_upper;
        val_[j] = up_[j];
      } else {
        state_[j] = VarState::free_nb;
        val_[j] = 0.0;
      }
    }

    Vec resid(b_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = val_[j];
      if (v != 0.0)
        for (std::size_t i = 0; i < m_; ++i) resid[i] -= a_.at(i, j) * v;
    }
    art_sign_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      art_sign_[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
      double* row = tab_.row(i);
      for (std::size_t j = 0; j < n_; ++j) row[j] = art_sign_[i] * a_.at(i, j);
      row[n_ + i] = 1.0;
      xb_[i] = std::fabs(resid[i]);
      basis_[i] = n_ + i;
      state_[n_ + i] = VarState::basic;
    }

    // Phase-1 reduced costs: cost 1 on artificials, all of which are basic.
    obj_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) obj_ += xb_[i];
    for (std::size_t j = 0; j < ntot_; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < m_; ++i) z += tab_.at(i, j);
      d_[j] = (j >= n_ ? 1.0 : 0.0) - z;
    }
  }

  // Entering eligibility and direction for nonbasic j; returns 0 if not eligible.
  int entering_direction(std::size_t j) const {
    switch (state_[j]) {
      case VarState::at_lower:
        return d_[j] < -dtol_ ? 1 : 0;
      case VarState::at_upper:
        return d_[j] > dtol_ ? -1 : 0;
      case VarState::free_nb:
        if (d_[j] < -dtol_) return 1;
        if (d_[j] > dtol_) return -1;
        return 0;
      case VarState::basic:
        return 0;
    }
    return 0;
  }

  void run_phase(bool phase1) {
    std::size_t stall = 0;
    bool bland = false;
    double last_obj = obj_;
    unbounded_ = false;

    while (iters_ < opts_.max_iterations) {
      // Entering variable.
      std::size_t enter = ntot_;
      int dir = 0;
      if (!bland) {
        double best = 0.0;
        for (std::size_t j = 0; j < ntot_; ++j) {
          if (!allowed_[j]) continue;
          const int s = entering_direction(j);
          if (s != 0 && std::fabs(d_[j]) > best) {
            best = std::fabs(d_[j]);
            enter = j;
            dir = s;
          }
        }
      } else {
        for (std::size_t j = 0; j < ntot_; ++j) {
          if (!allowed_[j]) continue;
          const int s = entering_direction(j);
          if (s != 0) {
            enter = j;
            dir = s;
            break;
          }
        }
      }
      if (enter == ntot_) return;  // phase optimal

      if (phase1 && obj_ <= feas_eps_ * 0.01) return;  // already feasible enough

      // Ratio test: how far can the entering variable move.
      const double sigma = static_cast<double>(dir);
      double span = up_[enter] - lo_[enter];  // inf if either bound is infinite
      double delta = std::isfinite(span) ? span : kInf;
      std::size_t leave = m_;
      double leave_pivot = 0.0;
      bool leave_to_lower = true;
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = tab_.at(i, enter);
        const double st = sigma * t;
        const std::size_t bj = basis_[i];
        double limit;
        bool to_lower;
        if (st > kPivotTol) {
          if (!std::isfinite(lo_[bj])) continue;
          limit = (xb_[i] - lo_[bj]) / st;
          to_lower = true;
        } else if (st < -kPivotTol) {
          if (!std::isfinite(up_[bj])) continue;
          limit = (up_[bj] - xb_[i]) / (-st);
          to_lower = false;
        } else {
          continue;
        }
        if (limit < 0.0) limit = 0.0;
        const bool better =
            limit < delta - kRatioTieTol ||
            (limit < delta + kRatioTieTol && leave < m_ &&
             (bland ? basis_[i] < basis_[leave] : std::fabs(t) > std::fabs(leave_pivot)));
        if (better || (leave == m_ && limit <= delta + kRatioTieTol && limit < delta)) {
          if (limit < delta) delta = limit;
          leave = i;
          leave_pivot = t;
          leave_to_lower = to_lower;
        }
      }

      if (!std::isfinite(delta)) {
        unbounded_ = true;
        return;
      }

      ++iters_;
      obj_ += d_[enter] * sigma * delta;

      if (leave == m_) {
        // Bound flip: the entering variable runs across its own span.
        for (std::size_t i = 0; i < m_; ++i) xb_[i] -= sigma * delta * tab_.at(i, enter);
        val_[enter] += sigma * delta;
        state_[enter] =
            state_[enter] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
      } else {
        const double enter_val = val_[enter] + sigma * delta;
        for (std::size_t i = 0; i < m_; ++i) {
          if (i != leave) xb_[i] -= sigma * delta * tab_.at(i, enter);
        }
        const std::size_t lv = basis_[leave];
        state_[lv] = leave_to_lower ? VarState::at_lower : VarState::at_upper;
        val_[lv] = leave_to_lower ? lo_[lv] : up_[lv];
        if (lv >= n_) allowed_[lv] = 0;  // artificials never re-enter

        // Eliminate the entering column.
        double* prow = tab_.row(leave);
        const double inv = 1.0 / prow[enter];
        kernels::scale(inv, prow, ntot_);
        prow[enter] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
          if (i == leave) continue;
          double* row = tab_.row(i);
          const double f = row[enter];
          if (f != 0.0) {
            kernels::axpy(-f, prow, row, ntot_);
            row[enter] = 0.0;
          }
        }
        const double fd = d_[enter];
        if (fd != 0.0) {
          kernels::axpy(-fd, prow, d_.data(), ntot_);
          d_[enter] = 0.0;
        }

        basis_[leave] = enter;
        state_[enter] = VarState::basic;
        xb_[leave] = enter_val;
      }

      if (obj_ < last_obj - 1e-12 * (1.0 + std::fabs(last_obj))) {
        last_obj = obj_;
        stall = 0;
        bland = false;
      } else if (++stall > kStallLimit) {
        bland = true;
      }
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      // Swap the zero-valued artificial for any structural with a usable pivot.
      std::size_t enter = ntot_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] == VarState::basic) continue;
        if (std::fabs(tab_.at(i, j)) > 1e-7) {
          enter = j;
          break;
        }
      }
      if (enter == ntot_) continue;  // redundant row; artificial stays pinned at zero
      const std::size_t lv = basis_[i];
      state_[lv] = VarState::at_lower;
      val_[lv] = 0.0;
      double* prow = tab_.row(i);
      const double inv = 1.0 / prow[enter];
      kernels::scale(inv, prow, ntot_);
      prow[enter] = 1.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == i) continue;
        double* row = tab_.row(r);
        const double f = row[enter];
        if (f != 0.0) {
          kernels::axpy(-f, prow, row, ntot_);
          row[enter] = 0.0;
        }
      }
      basis_[i] = enter;
      const double ev = val_[enter];
      state_[enter] = VarState::basic;
      xb_[i] = ev;  // degenerate swap, the entering variable does not move
      ++iters_;
    }
  }

  void prepare_phase2() {
    for (std::size_t j = n_; j < ntot_; ++j) {
      allowed_[j] = 0;
      lo_[j] = 0.0;
      up_[j] = 0.0;
      if (state_[j] != VarState::basic) {
        state_[j] = VarState::at_lower;
        val_[j] = 0.0;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_ && std::fabs(xb_[i]) <= feas_eps_) xb_[i] = 0.0;
    }
    // Reduced costs for the real objective.
    for (std::size_t j = 0; j < ntot_; ++j) d_[j] = j < n_ ? c_[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t bj = basis_[i];
      const double cb = bj < n_ ? c_[bj] : 0.0;
      if (cb != 0.0) kernels::axpy(-cb, tab_.row(i), d_.data(), ntot_);
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    obj_ = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = state_[j] == VarState::basic ? 0.0 : val_[j];
      obj_ += c_[j] * v;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) obj_ += c_[basis_[i]] * xb_[i];
    }
  }

  SolverOutcome finish(SolverOutcome& out, SolveStatus status) {
    refactor();
    out.x_star.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      out.x_star[j] = state_[j] == VarState::basic ? 0.0 : val_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) out.x_star[basis_[i]] = xb_[i];
    }
    out.objective = kernels::dot(c_.data(), out.x_star.data(), n_);
    Vec ax(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = out.x_star[j];
      if (v != 0.0)
        for (std::size_t i = 0; i < m_; ++i) ax[i] += a_.at(i, j) * v;
    }
    // Basic artificials of redundant rows still carry their (zero) share.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) ax[i] += art_sign_[basis_[i] - n_] * xb_[i];
    }
    out.residual_l2 = std::sqrt(kernels::diff_nrm2sq(ax.data(), b_.data(), m_));
    out.iterations = iters_;
    out.status = status;
    out.duality_gap = status == SolveStatus::optimal ? duality_gap(out) : 0.0;
    return out;
  }

  // Rebuild basic values and duals from a fresh factorization of the basis.
  void refactor() {
    Mat basis_mat(m_, m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t col = 0; col < m_; ++col) {
        const std::size_t bj = basis_[col];
        basis_mat.at(i, col) = bj < n_ ? a_.at(i, bj) : (bj - n_ == i ? art_sign_[i] : 0.0);
      }
    }
    DenseLu lu;
    if (!lu.factor(std::move(basis_mat))) return;  // keep tableau values
    lu_ok_ = true;
    lu_ = lu;
    Vec rhs(b_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::basic) continue;
      const double v = val_[j];
      if (v != 0.0)
        for (std::size_t i = 0; i < m_; ++i) rhs[i] -= a_.at(i, j) * v;
    }
    Vec fresh = lu_.solve(rhs);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t bj = basis_[i];
      double v = fresh[i];
      // Snap roundoff-level bound violations only.
      const double snap = 1e-11 * (1.0 + std::fabs(v));
      if (std::isfinite(lo_[bj]) && v < lo_[bj] && v > lo_[bj] - snap) v = lo_[bj];
      if (std::isfinite(up_[bj]) && v > up_[bj] && v < up_[bj] + snap) v = up_[bj];
      xb_[i] = v;
    }
  }

  double duality_gap(const SolverOutcome& out) {
    if (!lu_ok_) return 0.0;
    Vec cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb[i] = basis_[i] < n_ ? c_[basis_[i]] : 0.0;
    const Vec y = lu_.solve_transpose(cb);
    double dual = kernels::dot(y.data(), b_.data(), m_);
    double dual_infeas = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::basic) continue;
      double dj = c_[j];
      for (std::size_t i = 0; i < m_; ++i) dj -= a_.at(i, j) * y[i];
      dual += dj * val_[j];
      // Wrong-sign reduced costs bound the remaining suboptimality via the
      // variable's span (capped for half-open boxes).
      const double span = std::min(up_[j] - lo_[j], 1e6);
      if (state_[j] == VarState::at_lower && dj < 0.0) dual_infeas -= dj * span;
      if (state_[j] == VarState::at_upper && dj > 0.0) dual_infeas += dj * span;
      if (state_[j] == VarState::free_nb) dual_infeas += std::fabs(dj) * span;
    }
    return std::fabs(out.objective - dual) + dual_infeas;
  }

  const Mat& a_;
  const Vec& b_;
  const Vec& c_;
  SolverOptions opts_;
  std::size_t m_, n_, ntot_;
  Vec lo_, up_;
  double feas_eps_ = 0.0;
  double dtol_ = 0.0;

  Mat tab_;
  Vec d_;
  Vec xb_;
  Vec val_;
  std::vector<std::size_t> basis_;
  std::vector<VarState> state_;
  std::vector<char> allowed_;
  Vec art_sign_;
  double obj_ = 0.0;
  std::size_t iters_ = 0;
  bool unbounded_ = false;
  bool lu_ok_ = false;
  DenseLu lu_;
};

} // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

SolverOutcome lp_solve(const Mat& a, const Vec& b, const Vec& c, const Vec& lower,
                       const Vec& upper, const SolverOptions& opts) {
  BoundedSimplex simplex(a, b, c, lower, upper, opts);
  return simplex.run();
}

} // namespace binsense::solvers
