// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

namespace dcal {

// Magnitudes at or above this sentinel encode an infinite variable bound.
inline constexpr double kLpInfinity = 1e30;
// Fixed tolerances: all problems in this library live on [0,1]-scale data.
inline constexpr double kLpTolFeas = 1e-8;
inline constexpr double kLpTolPivot = 1e-10;

// Dense linear program: maximize objective . x subject to equality rows,
// <= rows, and per-variable bounds.  Rows hold sparse (column, coefficient)
// terms; columns are indexed 0..num_vars-1.
struct LpProblem {
  struct Row {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> eq_rows;
  std::vector<Row> le_rows;
  std::vector<double> lower;  // -kLpInfinity for unbounded below
  std::vector<double> upper;  // +kLpInfinity for unbounded above

  static LpProblem with_vars(int n);

  void set_bounds(int var, double lo, double hi);
  void set_objective(int var, double coeff);
  Row& add_eq(double rhs);
  Row& add_le(double rhs);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  // Row multipliers at optimality (same order as eq_rows / le_rows), with
  // the sign convention of the maximization form: for every variable at its
  // lower bound the reduced cost objective_j - y . A_j is <= 0, at its upper
  // bound >= 0, and 0 for basic variables (within tolerances).
  std::vector<double> dual_eq;
  std::vector<double> dual_le;
  int iterations = 0;
};

// Deterministic bounded-variable two-phase revised simplex.  Pricing is
// Dantzig (most improving, lowest index on ties) and switches to Bland's
// anti-cycling rule during degenerate stretches, so termination is
// guaranteed; identical input bits produce identical output bits.
LpSolution solve_lp(const LpProblem& p);

// Re-checks primal feasibility (tolerance kLpTolFeas) and the objective
// value (1e-9 relative) of an optimal solution.  Pure; false on violation.
bool verify_solution(const LpProblem& p, const LpSolution& s);

// Enables a coarse per-pivot trace on stderr (debug aid; format not stable).
void set_lp_trace(bool enabled);

}  // namespace dcal
