// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcal/noise.hpp"
#include "dcal/postprocess.hpp"

namespace dcal {

// Sweep configuration.  `mech_family` is a mechanism spec without a budget
// ("laplace" | "gauss[:variant=lemma|improved]" | "point"); each row builds
// the mechanism at its own eps.
struct ExperimentConfig {
  std::vector<double> eps_list;  // each in (0, 1/16]
  std::string mech_family = "laplace";
  BatchMode::Kind mode = BatchMode::Kind::kAnalytic;
  int trials = 1;            // mc repetitions / online runs per sequence
  std::uint64_t seed = 0;
  long long horizon = 0;     // online round count (even; split into a pair)
  int grid_m = 200;          // decision-loss extension cells
  int ece_bins = 1000;       // pushforward cells for the ece column
  long long mc_draws = 100000;  // per-trial draws in mc mode
};

// One checked bound: `value` is the measured metric, `bound` the
// theorem-side constant, slack = bound - value, and tol the allowance
// (binning error plus three standard errors); failed iff value > bound + tol.
struct BoundRow {
  double eps = 0.0;
  std::string metric;        // "ece" | "decision_loss" | "cdl"
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double std_error = 0.0;
  double tol = 0.0;
  bool failed = false;
  // Bound components (zero where not applicable; the improved Gaussian
  // reports sigma and 8 eps / sigma in the first two slots).
  double exp_abs_noise = 0.0;
  double dp_term = 0.0;
  double discretization = 0.0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  bool failed = false;       // any row failed
  bool has_slope = false;    // >= 3 eps values with positive ece
  double ece_slope = 0.0;    // log-log OLS slope of the ece column vs eps
};

// Builds the family mechanism at budget eps; throws InputError on an
// unknown family string.
NoiseMechanism make_family_mech(const std::string& family, double eps);

// Batch constant C = 2 max_q E|M(q)-q| + 4 (1 - e^{-gamma eps} + delta)
// composed from dp_params; the improved Gaussian takes its total-variation
// route sigma + 8 eps / sigma instead.
double theorem_bound_batch(const NoiseMechanism& mech, double epsilon);

// Online constant: max_q E|M(q)-q| + 4 (1 - e^{-gamma eps} + delta)
// + 2 rounds^{-1/3} (improved Gaussian: sigma + 8 eps/sigma + the same
// discretization term).
double theorem_bound_online(const NoiseMechanism& mech, double epsilon,
                            long long rounds);

// For each eps: the mechanism is applied to the q-marginal of the
// adversarial batch instance (ece row, `ece_bins` cells) and to its full
// coupling (decision_loss row, `grid_m` cells); both are compared against
// theorem_bound_batch.  The decision-loss extension is always analytic.
BoundReport run_batch_sweep(const ExperimentConfig& cfg);

// For each eps: the privacy post-processor runs `trials` times on both
// sequences of the online pair; the worse sequence's mean ece is compared
// against theorem_bound_online and its mean cdl against twice the measured
// ece (a per-run identity, so that row's tolerance is only rounding).
BoundReport run_online_sweep(const ExperimentConfig& cfg);

// OLS slope of ln y on ln x; requires >= 3 strictly positive points.
double fit_loglog_slope(const std::vector<double>& xs,
                        const std::vector<double>& ys);

// report.csv body: header eps,metric,value,bound,slack,stderr and one line
// per row in config order, 12 significant digits.
std::string report_to_csv(const BoundReport& report);
// Single-line JSON object with the rows (components and failed flags
// included) and the slope when available.
std::string report_to_json(const BoundReport& report);

}  // namespace dcal
