// Dense bounded-variable primal simplex on the tableau form of
//
//     A x - s = 0,   lb <= x <= ub,   row_lb <= s <= row_ub
//
// Phase 1 adds one artificial per row whose slack cannot absorb the initial
// row activity; artificials are never stored as tableau columns, once they
// leave the basis they are gone for good.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "respan/lp.hpp"

namespace respan {
namespace {

enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero, Dropped };

class Tableau {
 public:
  Tableau(const LpProblem& lp, const SimplexOptions& opts) : lp_(lp), opts_(opts) {
    n_ = lp.num_vars();
    m_ = lp.num_rows();
    cols_ = n_ + m_;
    lo_.resize(cols_ + m_);
    hi_.resize(cols_ + m_);
    x_.assign(cols_ + m_, 0.0);
    state_.assign(cols_ + m_, State::Dropped);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.vars()[j].lb;
      hi_[j] = lp.vars()[j].ub;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      lo_[n_ + i] = lp.row_lb(i);
      hi_[n_ + i] = lp.row_ub(i);
      lo_[cols_ + i] = 0.0;
      hi_[cols_ + i] = kInf;
    }
  }

  LpSolution run() {
    LpSolution sol;
    initialize();

    // phase 1
    if (num_artificial_ > 0) {
      set_costs(true);
      auto st = iterate(true);
      if (st != LpStatus::Optimal) return finish(st == LpStatus::Unbounded ? LpStatus::NumericalFailure : st);
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= cols_) infeas += x_[basis_[i]];
      if (infeas > kFeasTol) return finish(LpStatus::Infeasible);
      drive_out_artificials();
    }

    // phase 2
    for (std::size_t i = 0; i < m_; ++i) {
      hi_[cols_ + i] = 0.0;
      if (basis_[i] >= cols_) x_[basis_[i]] = 0.0;
    }
    set_costs(false);
    auto st = iterate(false);
    return finish(st);
  }

 private:
  double& t(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }

  void initialize() {
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = State::AtLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = State::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = State::FreeZero;
      }
    }
    tab_.assign(m_ * cols_, 0.0);
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      auto vars = lp_.row_vars(i);
      auto coefs = lp_.row_coefs(i);
      double act = 0.0;
      for (std::size_t k = 0; k < vars.size(); ++k) act += coefs[k] * x_[vars[k]];
      const std::size_t s = n_ + i;
      const double tol = opts_.primal_tol * (1.0 + std::abs(act));
      if (act >= lo_[s] - tol && act <= hi_[s] + tol) {
        // slack basic: s = A_i x, tableau row = [-A_i | e_i]
        for (std::size_t k = 0; k < vars.size(); ++k) t(i, vars[k]) = -coefs[k];
        t(i, s) = 1.0;
        basis_[i] = s;
        state_[s] = State::Basic;
        x_[s] = act;
      } else {
        const double b = act < lo_[s] ? lo_[s] : hi_[s];
        const double sigma = b - act > 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < vars.size(); ++k) t(i, vars[k]) = sigma * coefs[k];
        t(i, s) = -sigma;
        x_[s] = b;
        state_[s] = act < lo_[s] ? State::AtLower : State::AtUpper;
        basis_[i] = cols_ + i;
        state_[cols_ + i] = State::Basic;
        x_[cols_ + i] = sigma * (b - act);
        ++num_artificial_;
      }
    }
  }

  void set_costs(bool phase1) {
    cost_.assign(cols_ + m_, 0.0);
    if (phase1) {
      for (std::size_t i = 0; i < m_; ++i) cost_[cols_ + i] = 1.0;
    } else {
      for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.vars()[j].obj;
    }
    d_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) d_[j] = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < cols_) d_[basis_[i]] = 0.0;
  }

  bool can_increase(std::size_t j) const {
    return state_[j] == State::FreeZero || (state_[j] == State::AtLower && hi_[j] > lo_[j]);
  }
  bool can_decrease(std::size_t j) const {
    return state_[j] == State::FreeZero || (state_[j] == State::AtUpper && hi_[j] > lo_[j]);
  }

  LpStatus iterate(bool phase1) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::vector<std::size_t> pivot_nz;
    pivot_nz.reserve(cols_);

    while (true) {
      if (iterations_ >= opts_.max_iterations) return LpStatus::IterationLimit;

      // pricing
      std::size_t q = cols_;
      double dir = 0.0;
      double best = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == State::Basic) continue;
        const double dj = d_[j];
        double score = 0.0;
        double dj_dir = 0.0;
        if (dj < -opts_.optimality_tol && can_increase(j)) {
          score = -dj;
          dj_dir = 1.0;
        } else if (dj > opts_.optimality_tol && can_decrease(j)) {
          score = dj;
          dj_dir = -1.0;
        } else {
          continue;
        }
        if (bland) {
          q = j;
          dir = dj_dir;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dir = dj_dir;
        }
      }
      if (q == cols_) return LpStatus::Optimal;

      // ratio test
      double step = kInf;
      std::size_t leave_row = m_;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t(i, q);
        if (std::abs(a) <= opts_.pivot_tol) continue;
        const double delta = -dir * a;
        const std::size_t b = basis_[i];
        double limit = kInf;
        bool to_upper = false;
        if (delta < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limit = (x_[b] - lo_[b]) / -delta;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          limit = (hi_[b] - x_[b]) / delta;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (limit < step - 1e-12) {
          take = true;
        } else if (limit <= step + 1e-12 && leave_row < m_) {
          take = bland ? b < basis_[leave_row] : std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          step = limit;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_pivot = a;
        }
      }
      const double flip = hi_[q] - lo_[q];
      const bool bound_flip = std::isfinite(flip) && flip <= step;
      if (bound_flip) step = flip;
      if (!std::isfinite(step)) return LpStatus::Unbounded;

      ++iterations_;
      if (step <= 1e-12) {
        if (++degenerate_run >= opts_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // primal update
      x_[q] += dir * step;
      if (step != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = t(i, q);
          if (a != 0.0) x_[basis_[i]] -= dir * a * step;
        }
      }

      if (bound_flip) {
        if (dir > 0) {
          x_[q] = hi_[q];
          state_[q] = State::AtUpper;
        } else {
          x_[q] = lo_[q];
          state_[q] = State::AtLower;
        }
        continue;
      }

      const std::size_t r = leave_row;
      const std::size_t leaving = basis_[r];
      if (leaving >= cols_) {
        x_[leaving] = 0.0;
        state_[leaving] = State::Dropped;
      } else if (leave_to_upper) {
        x_[leaving] = hi_[leaving];
        state_[leaving] = State::AtUpper;
      } else {
        x_[leaving] = lo_[leaving];
        state_[leaving] = State::AtLower;
      }
      pivot(r, q, pivot_nz);
      (void)phase1;
    }
  }

  void pivot(std::size_t r, std::size_t q, std::vector<std::size_t>& nz) {
    double* prow = &tab_[r * cols_];
    const double inv = 1.0 / prow[q];
    nz.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (auto j : nz) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0)
      for (auto j : nz) d_[j] -= fd * prow[j];
    d_[q] = 0.0;
    basis_[r] = q;
    state_[q] = State::Basic;
  }

  void drive_out_artificials() {
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < cols_) continue;
      std::size_t best_j = cols_;
      double best_a = 1e-7;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == State::Basic) continue;
        const double a = std::abs(t(i, j));
        if (a > best_a) {
          best_a = a;
          best_j = j;
        }
      }
      if (best_j == cols_) continue;  // redundant row, artificial stays at 0
      const std::size_t art = basis_[i];
      x_[art] = 0.0;
      state_[art] = State::Dropped;
      pivot(i, best_j, nz);
    }
  }

  void refresh_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &tab_[i * cols_];
      double v = 0.0;
      for (std::size_t j = 0; j < cols_; ++j)
        if (state_[j] != State::Basic && row[j] != 0.0) v -= row[j] * x_[j];
      x_[basis_[i]] = v;
    }
  }

  LpSolution finish(LpStatus status) {
    if (status == LpStatus::Optimal && m_ > 0) refresh_basic_values();
    LpSolution sol;
    sol.status = status;
    sol.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    if (status == LpStatus::Optimal) {
      // snap values sitting within tolerance of a bound
      for (std::size_t j = 0; j < n_; ++j) {
        double& v = sol.primal[j];
        if (v < lo_[j] && v > lo_[j] - kFeasTol) v = lo_[j];
        if (v > hi_[j] && v < hi_[j] + kFeasTol) v = hi_[j];
      }
      auto rep = check_feasibility(lp_, sol.primal);
      if (rep.max_row_violation > kFeasTol || rep.max_bound_violation > kFeasTol)
        sol.status = LpStatus::NumericalFailure;
    }
    sol.objective = evaluate_objective(lp_, sol.primal);
    sol.iterations = iterations_;
    return sol;
  }

  const LpProblem& lp_;
  const SimplexOptions& opts_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0;
  std::vector<double> tab_;
  std::vector<double> lo_, hi_, x_, cost_, d_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  std::size_t num_artificial_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve_reference(const LpProblem& lp, const SimplexOptions& opts) {
  if (lp.num_vars() > opts.max_vars)
    throw LpError("reference solver size cap exceeded: " + std::to_string(lp.num_vars()) +
                  " variables > " + std::to_string(opts.max_vars));
  const auto start = std::chrono::steady_clock::now();
  Tableau tab(lp, opts);
  LpSolution sol = tab.run();
  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace respan
