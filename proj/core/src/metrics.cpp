// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "dcal/error.hpp"
#include "dcal/lp.hpp"

namespace dcal {
namespace {

// Sorted exact-valued union of the inputs.
std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::map<double, int> index_of(const std::vector<double>& knots) {
  std::map<double, int> idx;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    idx[knots[i]] = static_cast<int>(i);
  }
  return idx;
}

double expected_vshape(const VShapeScore& s, double p, double pi) {
  return (1.0 - pi) * eval_score(s, p, 0) + pi * eval_score(s, p, 1);
}

}  // namespace

double ece(const EmpiricalJoint& joint) {
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    total += joint.weight(i) * std::fabs(joint.value(i) - joint.posterior(i));
  }
  return total;
}

double smooth_cal(const EmpiricalJoint& joint) {
  int k = static_cast<int>(joint.size());
  LpProblem p = LpProblem::with_vars(k);
  for (int i = 0; i < k; ++i) {
    p.set_bounds(i, -1.0, 1.0);
    p.set_objective(i, joint.weight(i) * (joint.value(i) - joint.posterior(i)));
  }
  for (int i = 0; i + 1 < k; ++i) {
    double gap = joint.value(i + 1) - joint.value(i);
    p.add_le(gap).terms = {{i + 1, 1.0}, {i, -1.0}};
    p.add_le(gap).terms = {{i, 1.0}, {i + 1, -1.0}};
  }
  LpSolution s = solve_lp(p);
  if (s.status != LpStatus::kOptimal) {
    throw InternalError("smooth calibration LP did not reach an optimum");
  }
  return s.objective_value;
}

double dist(const Coupling& c) {
  double total = 0.0;
  for (const CouplingAtom& a : c.atoms()) total += a.mass * std::fabs(a.q - a.b);
  return total;
}

std::vector<double> dtc_b_columns(const EmpiricalJoint& joint,
                                  const GridSpec& grid) {
  std::vector<double> cols;
  cols.reserve(grid.num_points() + 2 * joint.size());
  for (int i = 0; i < grid.num_points(); ++i) cols.push_back(grid.point(i));
  for (std::size_t i = 0; i < joint.size(); ++i) {
    cols.push_back(joint.value(i));
    cols.push_back(joint.posterior(i));
  }
  return sorted_unique(std::move(cols));
}

DtcResult dtc(const EmpiricalJoint& joint, const GridSpec& grid) {
  if (grid.m < 2) throw InputError("dtc grid must have at least 2 cells");
  std::vector<Sample> atoms = joint.atoms();
  std::vector<double> b = dtc_b_columns(joint, grid);
  int na = static_cast<int>(atoms.size());
  int nb = static_cast<int>(b.size());
  // Variables rho(atom, b-level) >= 0, column-major by atom then level.
  LpProblem p = LpProblem::with_vars(na * nb);
  for (int ai = 0; ai < na; ++ai) p.add_eq(atoms[ai].weight);
  for (int bj = 0; bj < nb; ++bj) p.add_eq(0.0);
  for (int ai = 0; ai < na; ++ai) {
    for (int bj = 0; bj < nb; ++bj) {
      int v = ai * nb + bj;
      p.set_bounds(v, 0.0, kLpInfinity);
      // Minimize transport cost: maximize its negation.
      p.set_objective(v, -std::fabs(atoms[ai].prediction - b[bj]));
      p.eq_rows[ai].terms.emplace_back(v, 1.0);
      double cal = atoms[ai].state - b[bj];
      if (cal != 0.0) p.eq_rows[na + bj].terms.emplace_back(v, cal);
    }
  }
  LpSolution s = solve_lp(p);
  if (s.status != LpStatus::kOptimal) {
    throw InternalError("dtc transport LP did not reach an optimum");
  }
  DtcResult out;
  out.primal = -s.objective_value;
  out.grid_m = grid.m;
  // Certified lower bound: clamp the calibration multipliers into [-1,1]
  // and price every atom at its cheapest level under those multipliers.
  std::vector<double> sb(nb);
  for (int bj = 0; bj < nb; ++bj) {
    sb[bj] = std::clamp(s.dual_eq[na + bj], -1.0, 1.0);
  }
  double dual = 0.0;
  for (int ai = 0; ai < na; ++ai) {
    double r = kLpInfinity;
    for (int bj = 0; bj < nb; ++bj) {
      double cand = std::fabs(b[bj] - atoms[ai].prediction) +
                    (atoms[ai].state - b[bj]) * sb[bj];
      r = std::min(r, cand);
    }
    dual += atoms[ai].weight * r;
  }
  out.dual = dual;
  return out;
}

double dtc_primal(const EmpiricalJoint& joint, const GridSpec& grid) {
  return dtc(joint, grid).primal;
}

double dtc_dual(const EmpiricalJoint& joint, const GridSpec& grid) {
  return dtc(joint, grid).dual;
}

double swap_regret(const EmpiricalJoint& joint, const ProperScore& score) {
  validate_score(score);
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double x = joint.value(i), ph = joint.posterior(i), w = joint.weight(i);
    double e_post =
        (1.0 - ph) * eval_score(score, ph, 0) + ph * eval_score(score, ph, 1);
    double e_pred =
        (1.0 - ph) * eval_score(score, x, 0) + ph * eval_score(score, x, 1);
    total += w * (e_post - e_pred);
  }
  return total;
}

double swap_regret(const EmpiricalJoint& joint, const VShapeScore& score) {
  validate_score(score);
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double x = joint.value(i), ph = joint.posterior(i), w = joint.weight(i);
    total += w * (expected_vshape(score, ph, ph) - expected_vshape(score, x, ph));
  }
  return total;
}

CdlVshapeResult cdl_vshape(const EmpiricalJoint& joint) {
  std::vector<double> base{0.0, 1.0};
  for (std::size_t i = 0; i < joint.size(); ++i) {
    base.push_back(joint.value(i));
    base.push_back(joint.posterior(i));
  }
  base = sorted_unique(std::move(base));
  std::vector<double> candidates = base;
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    candidates.push_back(0.5 * (base[i] + base[i + 1]));
  }
  candidates = sorted_unique(std::move(candidates));
  CdlVshapeResult best{-1.0, 0.0};
  for (double mu : candidates) {
    double v = swap_regret(joint, VShapeScore{mu});
    if (v > best.value) best = {v, mu};
  }
  return best;
}

double cdl_lp(const EmpiricalJoint& joint) {
  std::vector<double> knots;
  knots.reserve(2 * joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    knots.push_back(joint.value(i));
    knots.push_back(joint.posterior(i));
  }
  knots = sorted_unique(std::move(knots));
  std::map<double, int> idx = index_of(knots);
  std::vector<double> c0(knots.size(), 0.0), c1(knots.size(), 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double x = joint.value(i), ph = joint.posterior(i), w = joint.weight(i);
    // + w E_{theta~ph} S(ph, theta) - w E_{theta~ph} S(x, theta).
    c0[idx.at(ph)] += w * (1.0 - ph);
    c1[idx.at(ph)] += w * ph;
    c0[idx.at(x)] -= w * (1.0 - ph);
    c1[idx.at(x)] -= w * ph;
  }
  return max_over_scores(knots, c0, c1).value;
}

double decision_loss(const Coupling& c) {
  std::vector<double> knots;
  knots.reserve(2 * c.size());
  for (const CouplingAtom& a : c.atoms()) {
    knots.push_back(a.q);
    knots.push_back(a.b);
  }
  knots = sorted_unique(std::move(knots));
  std::map<double, int> idx = index_of(knots);
  std::vector<double> c0(knots.size(), 0.0), c1(knots.size(), 0.0);
  for (const CouplingAtom& a : c.atoms()) {
    std::vector<double>& coef = a.state == 1 ? c1 : c0;
    coef[idx.at(a.b)] += a.mass;
    coef[idx.at(a.q)] -= a.mass;
  }
  return max_over_scores(knots, c0, c1).value;
}

MetricsReport compute_metrics(const EmpiricalJoint& joint, int grid_m) {
  MetricsReport r;
  r.ece = ece(joint);
  r.smcal = smooth_cal(joint);
  DtcResult d = dtc(joint, GridSpec::cells(grid_m));
  r.dtc_primal = d.primal;
  r.dtc_dual = d.dual;
  r.dtc_grid_m = d.grid_m;
  CdlVshapeResult v = cdl_vshape(joint);
  r.cdl_vshape = v.value;
  r.cdl_vshape_mu = v.mu;
  r.cdl_lp = cdl_lp(joint);
  return r;
}

}  // namespace dcal
