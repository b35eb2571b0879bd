// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "dcal/rng.hpp"

namespace dcal {

// A tau at or below this threshold is numerically a point mass at the center;
// the laplace factory clamps to NoiseKind::kPoint to avoid normalizer
// underflow.
inline constexpr double kPointMassTau = 1e-12;

enum class NoiseKind {
  kLaplace,   // untruncated density proportional to tau^{|p-q|}
  kGaussian,  // untruncated density proportional to exp(-(p-q)^2 / (2 sigma^2))
  kPoint,     // degenerate: all mass at the center q
};

enum class GaussianVariant {
  kLemma,     // sigma = sqrt(2 eps ln(1.25 / sqrt(eps)))
  kImproved,  // sigma = sqrt(eps); covered by the TV bound, no (gamma, delta)
              // claim of its own
};

// Differential-privacy accounting pair: for centers q, q' and any event S,
// Pr[M(q) in S] <= e^{gamma |q - q'|} Pr[M(q') in S] + delta.
struct DpParams {
  double gamma = 0.0;
  double delta = 0.0;
};

// Additive noise on a prediction q in [0,1], conditioned on the output
// landing in [0,1].  Immutable once constructed; sampling takes an external
// generator, so concurrent users hold independent Rng instances.
struct NoiseMechanism {
  NoiseKind kind = NoiseKind::kPoint;
  double tau = 0.0;    // laplace shape, in (kPointMassTau, 1)
  double sigma = 0.0;  // gaussian standard deviation, > 0

  // Set by the *_for_budget factories; raw-parameter mechanisms carry no
  // budget and cannot answer budget-derived queries (gaussian dp_params).
  bool has_budget = false;
  double eps = 0.0;
  GaussianVariant variant = GaussianVariant::kLemma;
};

// ---- Factories --------------------------------------------------------

// Raw-parameter constructors.  trunc_laplace clamps tau <= kPointMassTau to
// a point mass; tau >= 1 is rejected.
NoiseMechanism trunc_laplace(double tau);
NoiseMechanism trunc_gaussian(double sigma);
NoiseMechanism point_mass();

// Budget-calibrated constructors; eps must lie in (0, 0.25].
// laplace: tau = exp(-sqrt(1 / (2 eps))).
// gaussian: sigma per GaussianVariant above.
NoiseMechanism laplace_for_budget(double eps);
NoiseMechanism gaussian_for_budget(double eps, GaussianVariant variant);

// The gamma satisfying 1 - e^{-gamma eps} = min(2 sqrt(eps), 1 - 1e-12);
// the effective multiplicative budget entering the gaussian DpParams.
double gauss_gamma_eff(double eps);

// ---- Densities and moments -------------------------------------------

// Conditional density f_q(p) of the output at p, center q; both in [0,1].
// The point mass has no density; by convention it reports +infinity at p == q
// and 0 elsewhere (never integrated: every consumer special-cases kPoint).
double density(const NoiseMechanism& mech, double q, double p);

// Pr[M(q) <= p]; right-continuous step for the point mass.
double cdf(const NoiseMechanism& mech, double q, double p);

// Inverse-CDF draw from f_q; deterministic given the generator state.
double sample(const NoiseMechanism& mech, double q, Rng& rng);

// E|M(q) - q| in closed form.
double e_abs(const NoiseMechanism& mech, double q);

// max_q E|M(q) - q| over the q-grid {0, 1e-3, 2e-3, ..., 1}.
double expected_abs_noise(const NoiseMechanism& mech);

// ---- Differential-privacy accounting ---------------------------------

// laplace -> (-2 ln tau, 0); point -> (0, 0); gaussian built for budget eps
// -> (gauss_gamma_eff(eps), sqrt(eps)).  A raw gaussian has no recorded
// budget and throws InputError.
DpParams dp_params(const NoiseMechanism& mech);

// Max over grid triples (q, q', p) of
//   f_q(p) - e^{gamma |q - q'|} f_{q'}(p) - delta / grid_step,
// with (gamma, delta) = dp_params(mech); the delta term spreads the additive
// slack over one grid cell.  <= 1e-9 for every laplace mechanism.
// grid_step must lie in (0, 0.1].
double check_dp_ratio(const NoiseMechanism& mech, double grid_step);

// Exact delta accounting for the gaussian: max over grid pairs (q, q') of
// the f_q-mass of the event {p : log(f_q(p)/f_{q'}(p)) > gamma |q - q'|},
// computed in closed form from the gaussian tail.  The lemma-variant mass
// stays below delta = sqrt(eps); the improved variant has no such claim and
// the value is diagnostic.  Zero for laplace and point (their event is
// empty).  Requires a recorded budget for the gaussian.
double dp_tail_mass(const NoiseMechanism& mech, double grid_step = 0.01);

// Total-variation distance (1/2) int |f_b - f_q| between M(b) and M(q);
// quadrature split at the density kinks.  Point mass: 0 or 1.
double tv_distance(const NoiseMechanism& mech, double b, double q);

// ---- CLI spec strings -------------------------------------------------

// Grammar: "laplace:eps=0.01", "gauss:eps=0.01:variant=improved" (variant
// defaults to lemma), raw "laplace:tau=...", "gauss:sigma=...", or "point".
NoiseMechanism parse_mech_spec(const std::string& spec);

// Inverse of parse_mech_spec: a spec string that round-trips the mechanism.
std::string spec_string(const NoiseMechanism& mech);

}  // namespace dcal
