// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dcal/model.hpp"
#include "dcal/scores.hpp"

namespace dcal {

// Expected calibration error: sum_i w_i |x_i - posterior_i|.
double ece(const EmpiricalJoint& joint);

// Smooth calibration error: maximize sum_i w_i sigma_i (x_i - posterior_i)
// over sigma in [-1,1]^k with |sigma_{i+1} - sigma_i| bounded by the value
// gap between consecutive support points.
double smooth_cal(const EmpiricalJoint& joint);

// Expected |q - b| under a coupling.
double dist(const Coupling& c);

// The candidate b-levels used by the DTC programs: the uniform grid points
// of `grid` plus the support values and posteriors of the joint.
std::vector<double> dtc_b_columns(const EmpiricalJoint& joint,
                                  const GridSpec& grid);

// Grid-restricted distance to calibration.  `primal` transports each
// (value, state) atom onto calibrated b-levels at minimal expected movement;
// `dual` is a certified lower bound recovered from the optimal multipliers
// (within 1e-7 of primal at optimality).  True DTC lies within
// [primal - 1/m, primal].
struct DtcResult {
  double primal = 0.0;
  double dual = 0.0;
  int grid_m = 0;
};

DtcResult dtc(const EmpiricalJoint& joint, const GridSpec& grid);
double dtc_primal(const EmpiricalJoint& joint, const GridSpec& grid);
double dtc_dual(const EmpiricalJoint& joint, const GridSpec& grid);

// Swap regret of the posterior remap under a fixed score:
//   sum_i w_i (E_{theta~post_i} S(post_i, theta) - E_{theta~post_i} S(x_i, theta)).
// Throws InputError("improper score") if the score fails validation.
double swap_regret(const EmpiricalJoint& joint, const ProperScore& score);
double swap_regret(const EmpiricalJoint& joint, const VShapeScore& score);

// Best V-shaped swap regret over the finite candidate threshold set
// ({0,1}, support, posteriors, and midpoints of consecutive candidates);
// lowest maximizing mu on ties.
struct CdlVshapeResult {
  double value = 0.0;
  double mu = 0.0;
};

CdlVshapeResult cdl_vshape(const EmpiricalJoint& joint);

// Exact calibration decision loss on the support: maximal swap regret over
// all bounded proper scores, solved as a score LP with knots
// support u posteriors.
double cdl_lp(const EmpiricalJoint& joint);

// Maximal expected score improvement of b over q under the coupling, over
// all bounded proper scores (knots: q-values u b-values).  Never negative:
// constant scores always achieve zero.
double decision_loss(const Coupling& c);

// Full per-joint metric report (DTC on the m-cell grid, default 200).
struct MetricsReport {
  double ece = 0.0;
  double smcal = 0.0;
  double dtc_primal = 0.0;
  double dtc_dual = 0.0;
  int dtc_grid_m = 0;
  double cdl_vshape = 0.0;
  double cdl_vshape_mu = 0.0;
  double cdl_lp = 0.0;
};

MetricsReport compute_metrics(const EmpiricalJoint& joint, int grid_m = 200);

}  // namespace dcal
