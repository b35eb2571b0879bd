// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "dcal/error.hpp"

namespace dcal {

namespace {

bool g_trace = false;

bool finite_bound(double v) { return std::fabs(v) < kLpInfinity * 0.5; }

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper, kFree };

// Internal minimization workspace over structural + slack + artificial
// columns.  The basis inverse is kept dense and updated by eta pivots with
// periodic full refactorization.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : prob_(p) { build(); }

  LpSolution run();

 private:
  void build();
  void install_initial_basis();
  void refactorize();
  void compute_basic_values();
  double column_dot(int col, const std::vector<double>& y) const;
  void ftran(int col, std::vector<double>& w) const;
  // One phase of minimization over cost_.  Returns false if unbounded.
  bool iterate(bool phase_one);

  const LpProblem& prob_;
  int n_struct_ = 0;
  int n_slack_ = 0;
  int n_cols_ = 0;  // structural + slack + artificial
  int m_ = 0;       // eq rows first, then le rows
  int n_eq_ = 0;

  // Column-compressed constraint matrix (rows of each column sorted).
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> rhs_;
  std::vector<double> lo_, hi_;
  std::vector<double> cost_;  // current-phase minimization costs
  std::vector<VarState> state_;
  std::vector<double> x_;
  std::vector<int> basis_;      // basis_[i] = column basic in row i
  std::vector<int> basis_pos_;  // column -> row position, -1 if nonbasic
  std::vector<double> binv_;    // dense m_ x m_, row-major
  int pivots_since_refactor_ = 0;
  int iterations_ = 0;
};

void Simplex::build() {
  n_struct_ = prob_.num_vars;
  if (n_struct_ < 0) throw InputError("lp: negative variable count");
  if (static_cast<int>(prob_.objective.size()) != n_struct_ ||
      static_cast<int>(prob_.lower.size()) != n_struct_ ||
      static_cast<int>(prob_.upper.size()) != n_struct_) {
    throw InputError("lp: dimension mismatch");
  }
  n_eq_ = static_cast<int>(prob_.eq_rows.size());
  n_slack_ = static_cast<int>(prob_.le_rows.size());
  m_ = n_eq_ + n_slack_;
  n_cols_ = n_struct_ + n_slack_;

  cols_.assign(n_cols_, {});
  rhs_.assign(m_, 0.0);
  lo_.resize(n_cols_);
  hi_.resize(n_cols_);
  for (int j = 0; j < n_struct_; ++j) {
    double lo = prob_.lower[j];
    double hi = prob_.upper[j];
    if (std::isnan(lo) || std::isnan(hi) || std::isnan(prob_.objective[j])) {
      throw InputError("lp: NaN in problem data");
    }
    if (finite_bound(lo) && finite_bound(hi) && lo > hi) {
      throw InputError("lp: lower bound exceeds upper bound");
    }
    lo_[j] = lo;
    hi_[j] = hi;
  }
  auto load_row = [&](const LpProblem::Row& row, int r) {
    if (std::isnan(row.rhs)) throw InputError("lp: NaN in problem data");
    rhs_[r] = row.rhs;
    for (const auto& [col, coef] : row.terms) {
      if (col < 0 || col >= n_struct_) {
        throw InputError("lp: column index out of range");
      }
      if (std::isnan(coef)) throw InputError("lp: NaN in problem data");
      if (coef == 0.0) continue;
      cols_[col].emplace_back(r, coef);
    }
  };
  for (int r = 0; r < n_eq_; ++r) load_row(prob_.eq_rows[r], r);
  for (int r = 0; r < n_slack_; ++r) {
    load_row(prob_.le_rows[r], n_eq_ + r);
    int sj = n_struct_ + r;
    cols_[sj].emplace_back(n_eq_ + r, 1.0);
    lo_[sj] = 0.0;
    hi_[sj] = kLpInfinity;
  }
  for (auto& col : cols_) {
    std::sort(col.begin(), col.end());
    // Merge duplicate row entries so FTRAN/pricing see each row once.
    int out = 0;
    for (int k = 0; k < static_cast<int>(col.size()); ++k) {
      if (out > 0 && col[out - 1].first == col[k].first) {
        col[out - 1].second += col[k].second;
      } else {
        col[out++] = col[k];
      }
    }
    col.resize(out);
  }

  state_.assign(n_cols_, VarState::kAtLower);
  x_.assign(n_cols_, 0.0);
  for (int j = 0; j < n_cols_; ++j) {
    if (finite_bound(lo_[j])) {
      state_[j] = VarState::kAtLower;
      x_[j] = lo_[j];
    } else if (finite_bound(hi_[j])) {
      state_[j] = VarState::kAtUpper;
      x_[j] = hi_[j];
    } else {
      state_[j] = VarState::kFree;
      x_[j] = 0.0;
    }
  }
}

void Simplex::install_initial_basis() {
  // Residual of each row at the initial nonbasic point.
  std::vector<double> res = rhs_;
  for (int j = 0; j < n_cols_; ++j) {
    if (x_[j] == 0.0) continue;
    for (const auto& [r, v] : cols_[j]) res[r] -= v * x_[j];
  }
  basis_.assign(m_, -1);
  basis_pos_.assign(n_cols_, -1);
  std::vector<double> diag(m_, 1.0);
  for (int r = 0; r < m_; ++r) {
    bool le_row = r >= n_eq_;
    if (le_row && res[r] >= 0.0) {
      // The slack of this row absorbs the residual; no artificial needed.
      int sj = n_struct_ + (r - n_eq_);
      basis_[r] = sj;
      basis_pos_[sj] = r;
      state_[sj] = VarState::kBasic;
      x_[sj] = res[r];
      diag[r] = 1.0;
    } else {
      double s = res[r] >= 0.0 ? 1.0 : -1.0;
      int aj = n_cols_;
      cols_.emplace_back(1, std::make_pair(r, s));
      lo_.push_back(0.0);
      hi_.push_back(kLpInfinity);
      x_.push_back(std::fabs(res[r]));
      state_.push_back(VarState::kBasic);
      basis_pos_.push_back(r);
      basis_[r] = aj;
      ++n_cols_;
      diag[r] = s;
    }
  }
  binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
  for (int r = 0; r < m_; ++r) binv_[static_cast<size_t>(r) * m_ + r] = 1.0 / diag[r];
  pivots_since_refactor_ = 0;
}

void Simplex::refactorize() {
  // Gauss-Jordan inversion of the current basis matrix with partial pivoting.
  std::vector<double> mat(static_cast<size_t>(m_) * 2 * m_, 0.0);
  int w = 2 * m_;
  for (int i = 0; i < m_; ++i) {
    for (const auto& [r, v] : cols_[basis_[i]]) mat[static_cast<size_t>(r) * w + i] = v;
    mat[static_cast<size_t>(i) * w + m_ + i] = 1.0;
  }
  for (int c = 0; c < m_; ++c) {
    int piv = -1;
    double best = 0.0;
    for (int r = c; r < m_; ++r) {
      double a = std::fabs(mat[static_cast<size_t>(r) * w + c]);
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (piv < 0 || best < 1e-12) throw InternalError("lp: singular basis");
    if (piv != c) {
      for (int k = 0; k < w; ++k) {
        std::swap(mat[static_cast<size_t>(piv) * w + k], mat[static_cast<size_t>(c) * w + k]);
      }
    }
    double inv = 1.0 / mat[static_cast<size_t>(c) * w + c];
    for (int k = 0; k < w; ++k) mat[static_cast<size_t>(c) * w + k] *= inv;
    for (int r = 0; r < m_; ++r) {
      if (r == c) continue;
      double f = mat[static_cast<size_t>(r) * w + c];
      if (f == 0.0) continue;
      for (int k = 0; k < w; ++k) {
        mat[static_cast<size_t>(r) * w + k] -= f * mat[static_cast<size_t>(c) * w + k];
      }
    }
  }
  for (int r = 0; r < m_; ++r) {
    for (int c = 0; c < m_; ++c) {
      binv_[static_cast<size_t>(r) * m_ + c] = mat[static_cast<size_t>(r) * w + m_ + c];
    }
  }
  pivots_since_refactor_ = 0;
  compute_basic_values();
}

void Simplex::compute_basic_values() {
  std::vector<double> res = rhs_;
  for (int j = 0; j < n_cols_; ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    for (const auto& [r, v] : cols_[j]) res[r] -= v * x_[j];
  }
  for (int i = 0; i < m_; ++i) {
    double acc = 0.0;
    const double* row = &binv_[static_cast<size_t>(i) * m_];
    for (int r = 0; r < m_; ++r) acc += row[r] * res[r];
    x_[basis_[i]] = acc;
  }
}

double Simplex::column_dot(int col, const std::vector<double>& y) const {
  double acc = 0.0;
  for (const auto& [r, v] : cols_[col]) acc += y[r] * v;
  return acc;
}

void Simplex::ftran(int col, std::vector<double>& w) const {
  w.assign(m_, 0.0);
  for (const auto& [r, v] : cols_[col]) {
    if (v == 0.0) continue;
    for (int i = 0; i < m_; ++i) w[i] += binv_[static_cast<size_t>(i) * m_ + r] * v;
  }
}

bool Simplex::iterate(bool phase_one) {
  const long max_iters = 50000L + 200L * (static_cast<long>(m_) + n_cols_);
  // Dantzig pricing (most improving column, lowest index on ties) with a
  // deterministic switch to Bland's rule after a degenerate stretch, which
  // restores the anti-cycling guarantee; back to Dantzig on real progress.
  constexpr int kDegenerateLimit = 40;
  bool bland_mode = false;
  int degenerate_streak = 0;
  std::vector<double> y(m_), w;
  for (;;) {
    if (iterations_ > max_iters) throw InternalError("lp: iteration limit exceeded");
    // Duals of the current basis: y = cB' * Binv.
    for (int c = 0; c < m_; ++c) {
      double acc = 0.0;
      for (int i = 0; i < m_; ++i) {
        double cb = cost_[basis_[i]];
        if (cb != 0.0) acc += cb * binv_[static_cast<size_t>(i) * m_ + c];
      }
      y[c] = acc;
    }
    int enter = -1;
    int dir = 0;
    double best_improvement = kLpTolPivot;
    for (int j = 0; j < n_cols_; ++j) {
      VarState st = state_[j];
      if (st == VarState::kBasic) continue;
      if (lo_[j] == hi_[j] && st != VarState::kFree) continue;  // pinned
      double d = cost_[j] - column_dot(j, y);
      int cand_dir = 0;
      if ((st == VarState::kAtLower || st == VarState::kFree) && d < -kLpTolPivot) {
        cand_dir = 1;
      } else if ((st == VarState::kAtUpper || st == VarState::kFree) &&
                 d > kLpTolPivot) {
        cand_dir = -1;
      } else {
        continue;
      }
      if (bland_mode) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (std::fabs(d) > best_improvement) {
        best_improvement = std::fabs(d);
        enter = j;
        dir = cand_dir;
      }
    }
    if (enter < 0) return true;  // optimal for this phase

    ftran(enter, w);
    // Two-pass (Harris-style) ratio test: x_basic(t) = x_basic + t * move
    // with move_i = -dir * w_i.  Pass 1 finds the tightest step allowing a
    // small bound overshoot; pass 2 takes the numerically largest pivot
    // among rows whose exact ratio fits under that step, which keeps the
    // basis inverse well conditioned (lowest basis column index on ties).
    double t_limit = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      double move = -dir * w[i];
      int bj = basis_[i];
      if (move < -kLpTolPivot) {
        if (!finite_bound(lo_[bj])) continue;
        t_limit = std::min(t_limit, (x_[bj] - lo_[bj] + kLpTolFeas) / (-move));
      } else if (move > kLpTolPivot) {
        if (!finite_bound(hi_[bj])) continue;
        t_limit = std::min(t_limit, (hi_[bj] - x_[bj] + kLpTolFeas) / move);
      }
    }
    double t_best = std::numeric_limits<double>::infinity();
    int leave_pos = -1;
    double leave_to = 0.0;  // bound the leaving variable lands on
    double best_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      double move = -dir * w[i];
      int bj = basis_[i];
      double t_i = std::numeric_limits<double>::infinity();
      double to = 0.0;
      if (move < -kLpTolPivot) {
        if (!finite_bound(lo_[bj])) continue;
        t_i = (x_[bj] - lo_[bj]) / (-move);
        to = lo_[bj];
      } else if (move > kLpTolPivot) {
        if (!finite_bound(hi_[bj])) continue;
        t_i = (hi_[bj] - x_[bj]) / move;
        to = hi_[bj];
      } else {
        continue;
      }
      if (t_i < 0.0) t_i = 0.0;  // tolerance drift below a bound
      if (t_i > t_limit) continue;
      double a = std::fabs(w[i]);
      if (a > best_pivot + 1e-12 ||
          (a > best_pivot - 1e-12 && leave_pos >= 0 &&
           bj < basis_[leave_pos])) {
        best_pivot = a;
        t_best = t_i;
        leave_pos = i;
        leave_to = to;
      }
    }
    double t_flip = std::numeric_limits<double>::infinity();
    if (finite_bound(lo_[enter]) && finite_bound(hi_[enter])) {
      t_flip = hi_[enter] - lo_[enter];
    }

    ++iterations_;
    if (t_flip <= t_best) {
      if (!std::isfinite(t_flip)) {
        if (phase_one) throw InternalError("lp: phase one unbounded");
        return false;  // unbounded
      }
      // Bound flip: no basis change.
      for (int i = 0; i < m_; ++i) x_[basis_[i]] += t_flip * (-dir * w[i]);
      if (dir > 0) {
        x_[enter] = hi_[enter];
        state_[enter] = VarState::kAtUpper;
      } else {
        x_[enter] = lo_[enter];
        state_[enter] = VarState::kAtLower;
      }
      if (g_trace) {
        std::fprintf(stderr, "lp[%c] it=%d flip col=%d t=%.6g\n", phase_one ? '1' : '2',
                     iterations_, enter, t_flip);
      }
      // A bound flip strictly improves the objective (the box is nonempty).
      degenerate_streak = 0;
      bland_mode = false;
      continue;
    }
    if (!std::isfinite(t_best)) {
      if (phase_one) throw InternalError("lp: phase one unbounded");
      return false;  // unbounded
    }

    // Pivot: entering moves by dir * t_best, leaving lands on leave_to.
    for (int i = 0; i < m_; ++i) x_[basis_[i]] += t_best * (-dir * w[i]);
    x_[enter] += dir * t_best;
    int leave = basis_[leave_pos];
    x_[leave] = leave_to;
    state_[leave] =
        (finite_bound(lo_[leave]) && leave_to == lo_[leave]) ? VarState::kAtLower : VarState::kAtUpper;
    if (!finite_bound(lo_[leave]) && !finite_bound(hi_[leave])) state_[leave] = VarState::kFree;
    state_[enter] = VarState::kBasic;
    basis_pos_[leave] = -1;
    basis_[leave_pos] = enter;
    basis_pos_[enter] = leave_pos;

    double wl = w[leave_pos];
    if (std::fabs(wl) < 1e-13) throw InternalError("lp: degenerate pivot element");
    double* lrow = &binv_[static_cast<size_t>(leave_pos) * m_];
    double inv = 1.0 / wl;
    for (int c = 0; c < m_; ++c) lrow[c] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_pos) continue;
      double f = w[i];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int c = 0; c < m_; ++c) row[c] -= f * lrow[c];
    }
    if (g_trace) {
      std::fprintf(stderr, "lp[%c] it=%d pivot in=%d out=%d t=%.6g\n", phase_one ? '1' : '2',
                   iterations_, enter, leave, t_best);
    }
    if (t_best > 1e-12) {
      degenerate_streak = 0;
      bland_mode = false;
    } else if (++degenerate_streak > kDegenerateLimit) {
      bland_mode = true;
    }
    if (++pivots_since_refactor_ >= 128) refactorize();
  }
}

LpSolution Simplex::run() {
  install_initial_basis();

  // Phase 1: minimize the artificial sum when any artificial is active.
  int first_art = n_struct_ + n_slack_;
  double art_sum = 0.0;
  for (int j = first_art; j < n_cols_; ++j) art_sum += x_[j];
  if (art_sum > kLpTolFeas) {
    cost_.assign(n_cols_, 0.0);
    for (int j = first_art; j < n_cols_; ++j) cost_[j] = 1.0;
    iterate(true);  // bounded below by zero
    double resid = 0.0;
    for (int j = first_art; j < n_cols_; ++j) resid += x_[j];
    if (resid > kLpTolFeas) {
      LpSolution s;
      s.status = LpStatus::kInfeasible;
      s.iterations = iterations_;
      return s;
    }
  }
  // Pin artificials so phase 2 can never reactivate them.
  for (int j = first_art; j < n_cols_; ++j) {
    lo_[j] = 0.0;
    hi_[j] = 0.0;
    if (state_[j] != VarState::kBasic) {
      state_[j] = VarState::kAtLower;
      x_[j] = 0.0;
    }
  }

  cost_.assign(n_cols_, 0.0);
  for (int j = 0; j < n_struct_; ++j) cost_[j] = -prob_.objective[j];
  bool ok = iterate(false);

  LpSolution s;
  s.iterations = iterations_;
  if (!ok) {
    s.status = LpStatus::kUnbounded;
    return s;
  }
  s.status = LpStatus::kOptimal;
  s.x.assign(x_.begin(), x_.begin() + n_struct_);
  double obj = 0.0;
  for (int j = 0; j < n_struct_; ++j) obj += prob_.objective[j] * s.x[j];
  s.objective_value = obj;
  // Duals w.r.t. the maximization objective: negate the internal min duals.
  std::vector<double> y(m_);
  for (int c = 0; c < m_; ++c) {
    double acc = 0.0;
    for (int i = 0; i < m_; ++i) {
      double cb = cost_[basis_[i]];
      if (cb != 0.0) acc += cb * binv_[static_cast<size_t>(i) * m_ + c];
    }
    y[c] = -acc;
  }
  s.dual_eq.assign(y.begin(), y.begin() + n_eq_);
  s.dual_le.assign(y.begin() + n_eq_, y.end());
  return s;
}

}  // namespace

LpProblem LpProblem::with_vars(int n) {
  LpProblem p;
  p.num_vars = n;
  p.objective.assign(n, 0.0);
  p.lower.assign(n, -kLpInfinity);
  p.upper.assign(n, kLpInfinity);
  return p;
}

void LpProblem::set_bounds(int var, double lo, double hi) {
  lower.at(var) = lo;
  upper.at(var) = hi;
}

void LpProblem::set_objective(int var, double coeff) { objective.at(var) = coeff; }

LpProblem::Row& LpProblem::add_eq(double rhs) {
  eq_rows.push_back({{}, rhs});
  return eq_rows.back();
}

LpProblem::Row& LpProblem::add_le(double rhs) {
  le_rows.push_back({{}, rhs});
  return le_rows.back();
}

LpSolution solve_lp(const LpProblem& p) {
  Simplex s(p);
  return s.run();
}

bool verify_solution(const LpProblem& p, const LpSolution& s) {
  if (s.status != LpStatus::kOptimal) return false;
  if (static_cast<int>(s.x.size()) != p.num_vars) return false;
  for (int j = 0; j < p.num_vars; ++j) {
    double v = s.x[j];
    if (!std::isfinite(v)) return false;
    if (finite_bound(p.lower[j]) && v < p.lower[j] - kLpTolFeas) return false;
    if (finite_bound(p.upper[j]) && v > p.upper[j] + kLpTolFeas) return false;
  }
  auto row_value = [&](const LpProblem::Row& row) {
    double acc = 0.0;
    for (const auto& [col, coef] : row.terms) acc += coef * s.x[col];
    return acc;
  };
  for (const auto& row : p.eq_rows) {
    if (std::fabs(row_value(row) - row.rhs) > kLpTolFeas) return false;
  }
  for (const auto& row : p.le_rows) {
    if (row_value(row) > row.rhs + kLpTolFeas) return false;
  }
  double obj = 0.0;
  for (int j = 0; j < p.num_vars; ++j) obj += p.objective[j] * s.x[j];
  return std::fabs(obj - s.objective_value) <= 1e-9 * std::max(1.0, std::fabs(s.objective_value));
}

void set_lp_trace(bool enabled) { g_trace = enabled; }

}  // namespace dcal
