// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Self-contained dense LP/MILP kernel.
//
// The LP path is a bounded-variable primal simplex (full tableau, two
// phases with artificials only where the slack basis is infeasible).
// Duals are recovered from the slack columns of the tableau, which hold
// B^-1 throughout. The MILP path is depth-first branch and bound over
// binary variables with pseudocost branching; child nodes only change
// variable bounds, so they warm-start from the parent basis via a dual
// simplex restoration instead of re-solving from scratch.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sscuc::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerances {
  double pivot = 1e-9;
  double feasibility = 1e-7;
  double integrality = 1e-6;
};

enum class Sense { LE, EQ, GE };

enum class Status { Optimal, Infeasible, Unbounded, NodeLimit };

struct LinearProgram {
  std::vector<double> obj;  // minimization
  std::vector<double> lb, ub;
  std::vector<char> binary;

  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_var(double lo, double hi, double cost, bool is_binary = false) {
    obj.push_back(cost);
    lb.push_back(lo);
    ub.push_back(hi);
    binary.push_back(is_binary ? 1 : 0);
    return static_cast<int>(obj.size()) - 1;
  }

  int add_row(std::vector<std::pair<int, double>> terms, Sense s, double rhs) {
    rows.push_back(Row{std::move(terms), s, rhs});
    return static_cast<int>(rows.size()) - 1;
  }

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  // One multiplier per row. Sign convention: the multiplier of a binding
  // inequality is >= 0 under minimization regardless of sense; equality
  // rows carry the raw shadow price d(obj)/d(rhs).
  std::vector<double> duals;
  std::int64_t nodes = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  double complementarity = 0.0;

  bool optimal() const { return status == Status::Optimal; }
};

namespace detail {

enum class VarState : char { Basic, AtLower, AtUpper, Free };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const Tolerances& tol)
      : lp_(lp),
        tol_(tol),
        m_(lp.num_rows()),
        nstruct_(lp.num_vars()),
        cur_lb_(lp.lb),
        cur_ub_(lp.ub) {}

  // Full cold solve: rebuild the tableau, phase 1 if needed, phase 2.
  Solution solve() {
    build();
    Solution sol;
    if (need_phase1_) {
      run(phase1_cost_, /*phase1=*/true);
      refresh_basics();
      if (phase_objective(phase1_cost_) > 1e-7 * (1.0 + rhs_scale_)) {
        sol.status = Status::Infeasible;
        return sol;
      }
      // Lock artificials at zero for phase 2.
      for (int j = nstruct_ + m_; j < ncols_; ++j) {
        lo_[j] = 0.0;
        hi_[j] = 0.0;
        if (state_[j] != VarState::Basic) state_[j] = VarState::AtLower;
      }
    }
    bool bounded = run(cost_, /*phase1=*/false);
    refresh_basics();
    if (!bounded) {
      sol.status = Status::Unbounded;
      return sol;
    }
    extract(sol);
    return sol;
  }

  // Changes the working bounds of a structural variable. The factorized
  // tableau stays valid; only primal feasibility may break, which resolve()
  // repairs.
  void set_bounds(int j, double lo, double hi) {
    cur_lb_[j] = lo;
    cur_ub_[j] = hi;
    if (!built_) return;
    double oldv = state_[j] == VarState::Basic ? 0.0 : nb_value(j);
    lo_[j] = lo;
    hi_[j] = hi;
    if (state_[j] == VarState::Basic) return;
    if (state_[j] == VarState::Free) return;
    // Park the variable at the bound nearest its previous value.
    if (!std::isfinite(lo))
      state_[j] = std::isfinite(hi) ? VarState::AtUpper : VarState::Free;
    else if (!std::isfinite(hi))
      state_[j] = VarState::AtLower;
    else
      state_[j] = std::fabs(oldv - lo) <= std::fabs(oldv - hi) ? VarState::AtLower
                                                               : VarState::AtUpper;
  }

  // Warm re-solve after bound changes: refresh basic values, restore primal
  // feasibility with dual simplex pivots, then finish with the primal
  // simplex. Falls back to a cold solve when the warm path stalls.
  Solution resolve() {
    if (!built_) return solve();
    refresh_basics();
    int rc = dual_restore();
    Solution sol;
    if (rc == 1) {
      sol.status = Status::Infeasible;
      return sol;
    }
    if (rc == 2) return solve();
    bool bounded = run(cost_, /*phase1=*/false);
    refresh_basics();
    if (!bounded) {
      sol.status = Status::Unbounded;
      return sol;
    }
    extract(sol);
    return sol;
  }

 private:
  const LinearProgram& lp_;
  Tolerances tol_;
  int m_, nstruct_, ncols_ = 0;
  bool need_phase1_ = false;
  bool built_ = false;
  double rhs_scale_ = 0.0;

  std::vector<double> tab_;      // m_ x ncols_, row-major: B^-1 * A
  std::vector<double> xb_;       // values of basic variables
  std::vector<int> basis_;       // column in basis per row
  std::vector<double> lo_, hi_;  // per column (working bounds)
  std::vector<double> cur_lb_, cur_ub_;  // structural working bounds
  std::vector<double> cost_, phase1_cost_;
  std::vector<VarState> state_;

  double& tab(int r, int c) { return tab_[static_cast<size_t>(r) * ncols_ + c]; }

  double nb_value(int j) const {
    switch (state_[j]) {
      case VarState::AtLower: return lo_[j];
      case VarState::AtUpper: return hi_[j];
      default: return 0.0;
    }
  }

  void build() {
    // Columns: structurals, then one slack per row, then artificials.
    std::vector<double> resid(m_);
    std::vector<VarState> struct_state(nstruct_);
    for (int j = 0; j < nstruct_; ++j) {
      if (std::isfinite(cur_lb_[j]) &&
          (!std::isfinite(cur_ub_[j]) ||
           std::fabs(cur_lb_[j]) <= std::fabs(cur_ub_[j])))
        struct_state[j] = VarState::AtLower;
      else if (std::isfinite(cur_ub_[j]))
        struct_state[j] = VarState::AtUpper;
      else
        struct_state[j] = VarState::Free;
    }
    rhs_scale_ = 0.0;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      double r = row.rhs;
      rhs_scale_ = std::max(rhs_scale_, std::fabs(row.rhs));
      for (const auto& [j, a] : row.terms) {
        double v = struct_state[j] == VarState::AtLower   ? cur_lb_[j]
                   : struct_state[j] == VarState::AtUpper ? cur_ub_[j]
                                                          : 0.0;
        r -= a * v;
      }
      resid[i] = r;
    }
    int n_art = 0;
    std::vector<bool> slack_basic(m_);
    for (int i = 0; i < m_; ++i) {
      bool ok = false;
      switch (lp_.rows[i].sense) {
        case Sense::LE: ok = resid[i] >= -tol_.feasibility; break;
        case Sense::GE: ok = resid[i] <= tol_.feasibility; break;
        case Sense::EQ: ok = std::fabs(resid[i]) <= tol_.feasibility; break;
      }
      slack_basic[i] = ok;
      if (!ok) ++n_art;
    }
    need_phase1_ = n_art > 0;
    ncols_ = nstruct_ + m_ + n_art;

    tab_.assign(static_cast<size_t>(m_) * ncols_, 0.0);
    lo_.resize(ncols_);
    hi_.resize(ncols_);
    cost_.assign(ncols_, 0.0);
    phase1_cost_.assign(ncols_, 0.0);
    state_.resize(ncols_);
    basis_.resize(m_);
    xb_.resize(m_);

    for (int j = 0; j < nstruct_; ++j) {
      lo_[j] = cur_lb_[j];
      hi_[j] = cur_ub_[j];
      cost_[j] = lp_.obj[j];
      state_[j] = struct_state[j];
    }
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : lp_.rows[i].terms) tab(i, j) += a;
      int s = nstruct_ + i;
      tab(i, s) = 1.0;
      switch (lp_.rows[i].sense) {
        case Sense::LE: lo_[s] = 0.0; hi_[s] = kInf; break;
        case Sense::GE: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case Sense::EQ: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
      state_[s] = lp_.rows[i].sense == Sense::GE ? VarState::AtUpper : VarState::AtLower;
    }
    int a = nstruct_ + m_;
    for (int i = 0; i < m_; ++i) {
      if (slack_basic[i]) {
        basis_[i] = nstruct_ + i;
        state_[nstruct_ + i] = VarState::Basic;
        xb_[i] = resid[i];
      } else {
        double sgn = resid[i] >= 0.0 ? 1.0 : -1.0;
        if (sgn < 0) {
          // Initial basis column is sgn*e_i, so the tableau row (B^-1 A)
          // starts scaled by sgn.
          double* row = &tab_[static_cast<size_t>(i) * ncols_];
          for (int j = 0; j < ncols_; ++j) row[j] = -row[j];
        }
        tab(i, a) = 1.0;
        lo_[a] = 0.0;
        hi_[a] = kInf;
        phase1_cost_[a] = 1.0;
        state_[a] = VarState::Basic;
        basis_[i] = a;
        xb_[i] = std::fabs(resid[i]);
        ++a;
      }
    }
    built_ = true;
  }

  double phase_objective(const std::vector<double>& c) const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += c[basis_[i]] * xb_[i];
    for (int j = 0; j < ncols_; ++j)
      if (state_[j] != VarState::Basic) v += c[j] * nb_value(j);
    return v;
  }

  // Recompute basic values from scratch: xb = B^-1 b - sum_j T_j * x_j
  // over nonbasic j. Slack columns of the tableau hold B^-1.
  void refresh_basics() {
    std::vector<double> fresh(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double bk = lp_.rows[k].rhs;
      if (bk == 0.0) continue;
      const double* col = &tab_[0] + (nstruct_ + k);
      for (int i = 0; i < m_; ++i) fresh[i] += bk * col[static_cast<size_t>(i) * ncols_];
    }
    for (int j = 0; j < ncols_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      const double* col = &tab_[0] + j;
      for (int i = 0; i < m_; ++i) fresh[i] -= v * col[static_cast<size_t>(i) * ncols_];
    }
    xb_ = std::move(fresh);
  }

  // Reduced costs d = c - T' * cB for the given phase costs.
  void compute_reduced(const std::vector<double>& c, std::vector<double>& d) const {
    d = c;
    for (int i = 0; i < m_; ++i) {
      double f = c[basis_[i]];
      if (f == 0.0) continue;
      const double* row = &tab_[static_cast<size_t>(i) * ncols_];
      for (int j = 0; j < ncols_; ++j) d[j] -= f * row[j];
    }
  }

  // Returns false on unbounded. Maintains reduced costs incrementally.
  bool run(const std::vector<double>& c, bool phase1) {
    const double dtol = 1e-9;
    const std::int64_t stall_limit = 5LL * (m_ + ncols_);
    const std::int64_t iter_limit = 20000 + 200LL * (m_ + ncols_);
    bool bland = false;
    std::int64_t stall = 0, iters = 0, since_refresh = 0;
    double best_obj = phase_objective(c);

    std::vector<double> d;
    compute_reduced(c, d);
    for (;;) {
      if (++iters > iter_limit)
        throw std::runtime_error("simplex: iteration limit exceeded");
      if (++since_refresh >= 512) {
        refresh_basics();
        compute_reduced(c, d);
        since_refresh = 0;
      }

      int q = -1;
      double best_rate = dtol;
      int dir = +1;
      for (int j = 0; j < ncols_; ++j) {
        VarState st = state_[j];
        if (st == VarState::Basic) continue;
        if (lo_[j] == hi_[j]) continue;  // fixed
        double rate = 0.0;
        int jdir = 0;
        if ((st == VarState::AtLower || st == VarState::Free) && d[j] < -dtol) {
          rate = -d[j];
          jdir = +1;
        } else if ((st == VarState::AtUpper || st == VarState::Free) && d[j] > dtol) {
          rate = d[j];
          jdir = -1;
        } else {
          continue;
        }
        if (bland) {
          q = j;
          dir = jdir;
          break;
        }
        if (rate > best_rate) {
          best_rate = rate;
          q = j;
          dir = jdir;
        }
      }
      if (q < 0) return true;  // optimal for this phase

      // Ratio test: entering moves by delta >= 0 in direction dir.
      double own_gap = hi_[q] - lo_[q];  // inf if unbounded gap
      double delta = own_gap;
      int leave_row = -1;
      bool leave_at_upper = false;
      double best_piv = 0.0;
      const double* colq = &tab_[0] + q;
      for (int i = 0; i < m_; ++i) {
        double alpha = colq[static_cast<size_t>(i) * ncols_];
        if (std::fabs(alpha) <= tol_.pivot) continue;
        double step = -dir * alpha;  // d(xb_i)/d(delta)
        int bj = basis_[i];
        double cand;
        bool hits_upper;
        if (step > 0) {
          if (!std::isfinite(hi_[bj])) continue;
          cand = (hi_[bj] - xb_[i]) / step;
          hits_upper = true;
        } else {
          if (!std::isfinite(lo_[bj])) continue;
          cand = (xb_[i] - lo_[bj]) / (-step);
          hits_upper = false;
        }
        if (cand < 0) cand = 0;
        bool better;
        if (cand < delta - 1e-12) {
          better = true;
        } else if (cand < delta + 1e-12 && leave_row >= 0) {
          better = bland ? basis_[i] < basis_[leave_row] : std::fabs(alpha) > best_piv;
        } else {
          better = false;
        }
        if (better) {
          delta = cand;
          leave_row = i;
          leave_at_upper = hits_upper;
          best_piv = std::fabs(alpha);
        }
      }

      if (!std::isfinite(delta)) return phase1 ? true : false;  // unbounded

      if (leave_row < 0) {
        // Bound flip of the entering variable.
        for (int i = 0; i < m_; ++i) {
          double alpha = colq[static_cast<size_t>(i) * ncols_];
          if (alpha != 0.0) xb_[i] -= dir * delta * alpha;
        }
        state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      } else {
        double enter_val = nb_value(q) + dir * delta;
        for (int i = 0; i < m_; ++i) {
          if (i == leave_row) continue;
          double alpha = colq[static_cast<size_t>(i) * ncols_];
          if (alpha != 0.0) xb_[i] -= dir * delta * alpha;
        }
        int leave_col = basis_[leave_row];
        state_[leave_col] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
        if (lo_[leave_col] == hi_[leave_col]) state_[leave_col] = VarState::AtLower;
        basis_[leave_row] = q;
        state_[q] = VarState::Basic;
        xb_[leave_row] = enter_val;
        double dq = d[q];
        pivot(leave_row, q);
        // d' = d - d_q * (pivoted row); the pivoted row has 1 in column q.
        if (dq != 0.0) {
          const double* prow = &tab_[static_cast<size_t>(leave_row) * ncols_];
          for (int j = 0; j < ncols_; ++j) d[j] -= dq * prow[j];
        }
        d[q] = 0.0;
      }

      double obj = phase_objective(c);
      if (obj < best_obj - 1e-10 * (1.0 + std::fabs(best_obj))) {
        best_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > stall_limit) {
        bland = true;  // anti-cycling fallback
      }
    }
  }

  // Dual simplex pivots until all basic variables respect their bounds.
  // Returns 0 when primal feasibility is restored, 1 when the most violated
  // row certifies infeasibility (no column can reduce the violation), and
  // 2 when the iteration cap is hit (caller falls back to a cold solve).
  int dual_restore() {
    const double ftol = tol_.feasibility;
    std::vector<double> d;
    compute_reduced(cost_, d);
    std::int64_t iters = 0;
    const std::int64_t cap = 2000 + 4LL * m_;
    for (;;) {
      if (++iters > cap) return 2;
      int r = -1;
      double worst = ftol * 10.0, target = 0.0;
      for (int i = 0; i < m_; ++i) {
        int bj = basis_[i];
        double v = 0.0, tgt = 0.0;
        if (xb_[i] > hi_[bj]) {
          v = xb_[i] - hi_[bj];
          tgt = hi_[bj];
        } else if (xb_[i] < lo_[bj]) {
          v = lo_[bj] - xb_[i];
          tgt = lo_[bj];
        }
        if (v > worst) {
          worst = v;
          r = i;
          target = tgt;
        }
      }
      if (r < 0) return 0;

      double viol = xb_[r] - target;  // signed violation
      const double* row = &tab_[static_cast<size_t>(r) * ncols_];
      int q = -1;
      double best_ratio = kInf, best_alpha = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (lo_[j] == hi_[j]) continue;
        double alpha = row[j];
        if (std::fabs(alpha) <= tol_.pivot) continue;
        bool elig;
        if (state_[j] == VarState::Free)
          elig = true;
        else if (state_[j] == VarState::AtLower)
          elig = (viol > 0) == (alpha > 0);
        else
          elig = (viol > 0) == (alpha < 0);
        if (!elig) continue;
        double ratio = std::fabs(d[j]) / std::fabs(alpha);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && std::fabs(alpha) > std::fabs(best_alpha))) {
          best_ratio = ratio;
          q = j;
          best_alpha = alpha;
        }
      }
      if (q < 0) return 1;  // Farkas row: the violation cannot be reduced

      double delta_q = viol / row[q];
      const double* colq = &tab_[0] + q;
      for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double alpha = colq[static_cast<size_t>(i) * ncols_];
        if (alpha != 0.0) xb_[i] -= delta_q * alpha;
      }
      double enter_val = nb_value(q) + delta_q;
      int leave_col = basis_[r];
      state_[leave_col] = viol > 0 ? VarState::AtUpper : VarState::AtLower;
      if (lo_[leave_col] == hi_[leave_col]) state_[leave_col] = VarState::AtLower;
      basis_[r] = q;
      state_[q] = VarState::Basic;
      xb_[r] = enter_val;
      double dq = d[q];
      pivot(r, q);
      if (dq != 0.0) {
        const double* prow = &tab_[static_cast<size_t>(r) * ncols_];
        for (int j = 0; j < ncols_; ++j) d[j] -= dq * prow[j];
      }
      d[q] = 0.0;
    }
  }

  void pivot(int r, int q) {
    double* prow = &tab_[static_cast<size_t>(r) * ncols_];
    double piv = prow[q];
    double inv = 1.0 / piv;
    for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[static_cast<size_t>(i) * ncols_];
      double f = row[q];
      if (f == 0.0) continue;
      for (int j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
  }

  void extract(Solution& sol) {
    sol.status = Status::Optimal;
    sol.x.assign(nstruct_, 0.0);
    for (int j = 0; j < nstruct_; ++j)
      if (state_[j] != VarState::Basic) sol.x[j] = nb_value(j);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < nstruct_) sol.x[basis_[i]] = xb_[i];

    double obj = 0.0;
    for (int j = 0; j < nstruct_; ++j) obj += lp_.obj[j] * sol.x[j];
    sol.objective = obj;

    // y_i = cB' * column of B^-1, read off the slack columns.
    std::vector<double> y(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      const double* row = &tab_[static_cast<size_t>(k) * ncols_];
      double ck = cost_[basis_[k]];
      if (ck == 0.0) continue;
      for (int i = 0; i < m_; ++i) y[i] += ck * row[nstruct_ + i];
    }
    sol.duals.resize(m_);
    for (int i = 0; i < m_; ++i) {
      switch (lp_.rows[i].sense) {
        case Sense::LE: sol.duals[i] = -y[i]; break;
        case Sense::GE: sol.duals[i] = y[i]; break;
        case Sense::EQ: sol.duals[i] = y[i]; break;
      }
    }

    // Certificate residuals against the working bounds.
    double pres = 0.0, compl_ = 0.0;
    std::vector<double> yA(nstruct_, 0.0);
    double dual_obj = 0.0;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      double ax = 0.0;
      for (const auto& [j, a] : row.terms) {
        ax += a * sol.x[j];
        yA[j] += y[i] * a;
      }
      double slack = row.rhs - ax;
      switch (row.sense) {
        case Sense::LE: pres = std::max(pres, -slack); break;
        case Sense::GE: pres = std::max(pres, slack); break;
        case Sense::EQ: pres = std::max(pres, std::fabs(slack)); break;
      }
      compl_ = std::max(compl_, std::fabs(y[i] * slack));
      dual_obj += y[i] * row.rhs;
    }
    double dres = 0.0;
    for (int j = 0; j < nstruct_; ++j) {
      pres = std::max(pres, cur_lb_[j] - sol.x[j]);
      pres = std::max(pres, sol.x[j] - cur_ub_[j]);
      double dj = lp_.obj[j] - yA[j];
      if (state_[j] == VarState::Basic) {
        dres = std::max(dres, std::fabs(dj));
      } else if (state_[j] == VarState::AtLower) {
        if (cur_lb_[j] != cur_ub_[j]) dres = std::max(dres, -dj);
        dual_obj += dj * cur_lb_[j];
      } else if (state_[j] == VarState::AtUpper) {
        if (cur_lb_[j] != cur_ub_[j]) dres = std::max(dres, dj);
        dual_obj += dj * cur_ub_[j];
      } else {
        dres = std::max(dres, std::fabs(dj));
      }
    }
    for (int i = 0; i < m_; ++i) {  // slack column stationarity
      int s = nstruct_ + i;
      double dj = -y[i];
      if (state_[s] == VarState::Basic) {
        dres = std::max(dres, std::fabs(dj));
      } else if (state_[s] == VarState::AtLower && std::isfinite(lo_[s])) {
        if (lo_[s] != hi_[s]) dres = std::max(dres, -dj);
        dual_obj += dj * lo_[s];
      } else if (state_[s] == VarState::AtUpper) {
        if (lo_[s] != hi_[s]) dres = std::max(dres, dj);
        dual_obj += dj * hi_[s];
      }
    }
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.complementarity = compl_;
    sol.duality_gap = std::fabs(obj - dual_obj);
    sol.nodes = 1;
  }
};

}  // namespace detail

inline Solution solve_lp(const LinearProgram& lp, const Tolerances& tol = {}) {
  detail::Simplex s(lp, tol);
  return s.solve();
}

inline Solution solve_milp(const LinearProgram& lp, double gap_tol = 1e-6,
                           std::int64_t node_limit = 1'000'000,
                           const Tolerances& tol = {}) {
  std::vector<int> bins;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.binary[j]) bins.push_back(j);

  detail::Simplex spx(lp, tol);
  Solution incumbent;
  incumbent.status = Status::Infeasible;
  double cutoff = kInf;
  std::int64_t nodes = 0;
  bool budget_hit = false;

  auto frac_of = [](double v) {
    double f = v - std::floor(v);
    return std::min(f, 1.0 - f);
  };
  // Pseudocost bookkeeping: average objective degradation per unit of
  // rounded-away fraction, per variable and branch direction.
  struct Pseudo {
    double sum_dn = 0.0, sum_up = 0.0;
    int n_dn = 0, n_up = 0;
  };
  std::vector<Pseudo> pseudo(lp.num_vars());
  double global_dn = 1.0, global_up = 1.0;
  int global_n = 0;
  auto record = [&](int j, int dir, double gain, double dist) {
    if (dist < 1e-9) return;
    double per_unit = std::max(0.0, gain) / dist;
    if (dir == 0) {
      pseudo[j].sum_dn += per_unit;
      ++pseudo[j].n_dn;
    } else {
      pseudo[j].sum_up += per_unit;
      ++pseudo[j].n_up;
    }
    global_dn += per_unit;
    global_up += per_unit;
    ++global_n;
  };
  auto estimate = [&](int j, int dir) {
    const auto& p = pseudo[j];
    if (dir == 0)
      return p.n_dn > 0 ? p.sum_dn / p.n_dn : global_dn / (global_n + 1);
    return p.n_up > 0 ? p.sum_up / p.n_up : global_up / (global_n + 1);
  };

  auto choose = [&](const Solution& s) {
    int best = -1;
    double best_score = -1.0;
    for (int j : bins) {
      double f = s.x[j] - std::floor(s.x[j]);
      if (std::min(f, 1.0 - f) <= tol.integrality) continue;
      double dn = estimate(j, 0) * f;
      double up = estimate(j, 1) * (1.0 - f);
      double score = std::max(std::min(dn, up), 1e-12) *
                     std::max(std::max(dn, up), 1e-12);
      if (score > best_score + 1e-15) {
        best_score = score;
        best = j;
      }
    }
    return best;
  };

  auto accept = [&](const Solution& s) {
    if (s.objective < cutoff) {
      incumbent = s;
      incumbent.status = Status::Optimal;
      cutoff = s.objective;
    }
  };
  auto pruned = [&](double bound) {
    return std::isfinite(cutoff) &&
           bound >= cutoff - gap_tol * (1.0 + std::fabs(cutoff));
  };

  // Depth-first recursion; `s` is the LP solution at the current bounds.
  auto explore = [&](auto&& self, const Solution& s) -> void {
    int bv = choose(s);
    if (bv < 0) {
      accept(s);
      return;
    }
    double f = s.x[bv] - std::floor(s.x[bv]);
    int first = estimate(bv, 0) * f <= estimate(bv, 1) * (1.0 - f) ? 0 : 1;
    for (int k = 0; k < 2; ++k) {
      int val = k == 0 ? first : 1 - first;
      if (budget_hit) break;
      if (++nodes > node_limit) {
        budget_hit = true;
        break;
      }
      spx.set_bounds(bv, val, val);
      Solution c = spx.resolve();
      double dist = val == 0 ? f : 1.0 - f;
      record(bv, val, c.status == Status::Optimal ? c.objective - s.objective
                                                  : std::fabs(s.objective) + 1.0,
             dist);
      if (c.status == Status::Optimal && !pruned(c.objective)) self(self, c);
      spx.set_bounds(bv, lp.lb[bv], lp.ub[bv]);
    }
  };

  Solution root = spx.solve();
  ++nodes;
  if (root.status != Status::Optimal) {
    root.nodes = nodes;
    return root;
  }
  bool root_integral = true;
  for (int j : bins)
    if (frac_of(root.x[j]) > tol.integrality) {
      root_integral = false;
      break;
    }
  if (root_integral) {
    root.nodes = nodes;
    return root;
  }

  // Diving heuristic at the root for an early cutoff: fix the most nearly
  // integral fractional binary to its rounded value and re-solve, flipping
  // on infeasibility.
  {
    Solution cur = root;
    bool dead = false;
    for (size_t depth = 0; depth < bins.size(); ++depth) {
      int pick = -1;
      double best_dist = 1.0;
      for (int j : bins) {
        double dist = frac_of(cur.x[j]);
        if (dist > tol.integrality && dist < best_dist) {
          best_dist = dist;
          pick = j;
        }
      }
      if (pick < 0) break;
      double v = cur.x[pick] >= 0.5 ? 1.0 : 0.0;
      spx.set_bounds(pick, v, v);
      Solution c = spx.resolve();
      ++nodes;
      if (c.status != Status::Optimal) {
        spx.set_bounds(pick, 1.0 - v, 1.0 - v);
        c = spx.resolve();
        ++nodes;
        if (c.status != Status::Optimal) {
          dead = true;
          break;
        }
      }
      cur = std::move(c);
    }
    if (!dead) accept(cur);
    for (int j : bins) spx.set_bounds(j, lp.lb[j], lp.ub[j]);
  }

  // Reduced-cost fixing at the root: with an incumbent in hand, a binary
  // whose root reduced cost alone pushes past the cutoff can be fixed for
  // the entire search.
  if (std::isfinite(cutoff) && !root.duals.empty()) {
    std::vector<double> y(lp.num_rows());
    for (int i = 0; i < lp.num_rows(); ++i)
      y[i] = lp.rows[i].sense == Sense::LE ? -root.duals[i] : root.duals[i];
    std::vector<double> red(lp.num_vars());
    for (int j = 0; j < lp.num_vars(); ++j) red[j] = lp.obj[j];
    for (int i = 0; i < lp.num_rows(); ++i) {
      if (y[i] == 0.0) continue;
      for (const auto& [j, a] : lp.rows[i].terms) red[j] -= y[i] * a;
    }
    double margin = cutoff - gap_tol * (1.0 + std::fabs(cutoff));
    for (int j : bins) {
      if (root.x[j] <= tol.integrality && red[j] > 0.0 &&
          root.objective + red[j] >= margin)
        spx.set_bounds(j, 0.0, 0.0);
      else if (root.x[j] >= 1.0 - tol.integrality && red[j] < 0.0 &&
               root.objective - red[j] >= margin)
        spx.set_bounds(j, 1.0, 1.0);
    }
  }

  explore(explore, root);

  for (int j : bins) spx.set_bounds(j, lp.lb[j], lp.ub[j]);

  incumbent.nodes = nodes;
  incumbent.duals.clear();
  if (budget_hit && incumbent.status == Status::Optimal)
    incumbent.status = Status::NodeLimit;
  return incumbent;
}

// CPLEX LP text format dump, for offline debugging of subproblems.
inline void write_lp_file(const LinearProgram& lp, std::ostream& os,
                          const std::string& name = "lp") {
  os << "\\ " << name << "\nMinimize\n obj:";
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.obj[j] != 0.0)
      os << (lp.obj[j] >= 0 ? " + " : " - ") << std::fabs(lp.obj[j]) << " x" << j;
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    os << " c" << i << ":";
    for (const auto& [j, a] : r.terms)
      os << (a >= 0 ? " + " : " - ") << std::fabs(a) << " x" << j;
    os << (r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ")
       << r.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (std::isfinite(lp.lb[j]) && lp.lb[j] == lp.ub[j]) {
      os << " x" << j << " = " << lp.lb[j] << "\n";
      continue;
    }
    os << " " << (std::isfinite(lp.lb[j]) ? std::to_string(lp.lb[j]) : "-inf")
       << " <= x" << j << " <= "
       << (std::isfinite(lp.ub[j]) ? std::to_string(lp.ub[j]) : "+inf") << "\n";
  }
  bool any_bin = false;
  for (int j = 0; j < lp.num_vars(); ++j) any_bin |= lp.binary[j] != 0;
  if (any_bin) {
    os << "Binary\n";
    for (int j = 0; j < lp.num_vars(); ++j)
      if (lp.binary[j]) os << " x" << j << "\n";
  }
  os << "End\n";
}

}  // namespace sscuc::opt
