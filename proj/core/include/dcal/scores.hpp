// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace dcal {

// Bounded proper scoring rule for a binary outcome, represented by a convex
// potential: ascending knots x_j in [0,1], potential values G_j, and
// subgradients g_j.  Evaluation follows the tangent envelope
//   S(p, theta) = G_j + g_j (theta - x_j),  j = argmax_j G_j + g_j (p - x_j)
// with the lowest index winning ties.
struct ProperScore {
  std::vector<double> knots;
  std::vector<double> potential;  // G_j
  std::vector<double> slope;      // g_j
};

// The V-shaped family with threshold mu:
//   S_mu(p, theta) = 1/2 -+ (1/2)(theta - mu)/max{mu, 1-mu}
// using the minus branch when p <= mu and the plus branch otherwise.
struct VShapeScore {
  double mu = 0.5;
};

// Checks the ProperScore invariants (all-pairs convexity, boundedness of the
// tangent values at theta = 0 and 1, and envelope consistency at the knots).
// Throws InputError("improper score") on violation.
void validate_score(const ProperScore& score);
void validate_score(const VShapeScore& score);

double eval_score(const ProperScore& score, double p, int theta);
double eval_score(const VShapeScore& score, double p, int theta);

// Tangent-envelope representation of a V-shaped score (two knots, or one
// when mu = 1); evaluates identically to the closed form.
ProperScore to_proper(const VShapeScore& score);

// Maximizes a linear functional of a bounded proper score over the given
// strictly ascending knots:
//   sum_j c0[j] S(x_j, 0) + c1[j] S(x_j, 1).
// Restricting attention to the knots is exact for objectives of this form
// because any bounded proper score restricts to a feasible tangent system on
// the knots and any feasible tangent system extends to a bounded proper
// score via its envelope.
struct ScoreLpResult {
  double value = 0.0;
  ProperScore witness;
};

ScoreLpResult max_over_scores(const std::vector<double>& knots,
                              const std::vector<double>& c0,
                              const std::vector<double>& c1);

}  // namespace dcal
