// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/scores.hpp"

#include <cmath>
#include <cstddef>

#include "dcal/error.hpp"
#include "dcal/lp.hpp"

namespace dcal {
namespace {

constexpr double kScoreTol = 1e-7;

[[noreturn]] void improper() { throw InputError("improper score"); }

// Lowest-index maximizer of the tangent value at p.
std::size_t envelope_argmax(const ProperScore& s, double p) {
  std::size_t best = 0;
  double best_v = s.potential[0] + s.slope[0] * (p - s.knots[0]);
  for (std::size_t j = 1; j < s.knots.size(); ++j) {
    double v = s.potential[j] + s.slope[j] * (p - s.knots[j]);
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

}  // namespace

void validate_score(const ProperScore& score) {
  std::size_t n = score.knots.size();
  if (n == 0 || score.potential.size() != n || score.slope.size() != n) {
    improper();
  }
  for (std::size_t j = 0; j < n; ++j) {
    double x = score.knots[j];
    if (!(x >= 0.0 && x <= 1.0) || !std::isfinite(score.potential[j]) ||
        !std::isfinite(score.slope[j])) {
      improper();
    }
    if (j > 0 && !(score.knots[j] > score.knots[j - 1])) improper();
    double at0 = score.potential[j] - score.slope[j] * x;
    double at1 = score.potential[j] + score.slope[j] * (1.0 - x);
    if (at0 < -kScoreTol || at0 > 1.0 + kScoreTol || at1 < -kScoreTol ||
        at1 > 1.0 + kScoreTol) {
      improper();
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      double tangent = score.potential[j] +
                       score.slope[j] * (score.knots[l] - score.knots[j]);
      if (tangent > score.potential[l] + kScoreTol) improper();
    }
  }
  // Envelope consistency: evaluating at a knot must reproduce that knot's
  // tangent (ties may pick an earlier index only if the lines coincide).
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t i = envelope_argmax(score, score.knots[j]);
    if (i == j) continue;
    double vi = score.potential[i] +
                score.slope[i] * (score.knots[j] - score.knots[i]);
    if (std::fabs(vi - score.potential[j]) > kScoreTol ||
        std::fabs(score.slope[i] - score.slope[j]) > kScoreTol) {
      improper();
    }
  }
}

void validate_score(const VShapeScore& score) {
  if (!(score.mu >= 0.0 && score.mu <= 1.0)) improper();
}

double eval_score(const ProperScore& score, double p, int theta) {
  std::size_t j = envelope_argmax(score, p);
  return score.potential[j] + score.slope[j] * (theta - score.knots[j]);
}

double eval_score(const VShapeScore& score, double p, int theta) {
  double m = std::max(score.mu, 1.0 - score.mu);
  double half_step = 0.5 * (theta - score.mu) / m;
  return p <= score.mu ? 0.5 - half_step : 0.5 + half_step;
}

ProperScore to_proper(const VShapeScore& score) {
  validate_score(score);
  double mu = score.mu;
  double m = std::max(mu, 1.0 - mu);
  ProperScore out;
  // Left branch tangent anchored at mu (ties at p = mu pick it, matching
  // the p <= mu branch), right branch anchored at 1.
  double left_a = 0.5 + 0.5 * mu / m;
  double left_b = 0.5 - 0.5 * (1.0 - mu) / m;
  out.knots.push_back(mu);
  out.potential.push_back((1.0 - mu) * left_a + mu * left_b);
  out.slope.push_back(left_b - left_a);
  if (mu < 1.0) {
    double right_a = 0.5 - 0.5 * mu / m;
    double right_b = 0.5 + 0.5 * (1.0 - mu) / m;
    out.knots.push_back(1.0);
    out.potential.push_back(right_b);  // (1-x)a + x b at x = 1
    out.slope.push_back(right_b - right_a);
    // Both tangents meet at mu analytically; force the tie to hold exactly
    // in floating point so the envelope picks the left branch there.
    double crossing = out.potential[1] + out.slope[1] * (mu - 1.0);
    out.potential[0] = std::max(out.potential[0], crossing);
  }
  return out;
}

ScoreLpResult max_over_scores(const std::vector<double>& knots,
                              const std::vector<double>& c0,
                              const std::vector<double>& c1) {
  std::size_t n = knots.size();
  if (n == 0 || c0.size() != n || c1.size() != n) {
    throw InputError("score objective dimension mismatch");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(knots[j] >= 0.0 && knots[j] <= 1.0)) {
      throw InputError("score knot out of [0,1]");
    }
    if (j > 0 && !(knots[j] > knots[j - 1])) {
      throw InputError("score knots must be strictly ascending");
    }
  }
  // Variables: a_j = S(x_j, 0) at columns j, b_j = S(x_j, 1) at columns n+j.
  // Pairwise propriety between adjacent knots (which implies the all-pairs
  // convexity of the induced potential) plus the [0,1] boxes describe
  // exactly the bounded proper tangent systems on these knots.
  LpProblem p = LpProblem::with_vars(static_cast<int>(2 * n));
  for (std::size_t j = 0; j < n; ++j) {
    p.set_bounds(static_cast<int>(j), 0.0, 1.0);
    p.set_bounds(static_cast<int>(n + j), 0.0, 1.0);
    p.set_objective(static_cast<int>(j), c0[j]);
    p.set_objective(static_cast<int>(n + j), c1[j]);
  }
  for (std::size_t l = 0; l + 1 < n; ++l) {
    int a0 = static_cast<int>(l), a1 = static_cast<int>(l + 1);
    int b0 = static_cast<int>(n + l), b1 = static_cast<int>(n + l + 1);
    double xl = knots[l], xr = knots[l + 1];
    // Belief x_{l+1} prefers predicting x_{l+1} over x_l.
    auto& up = p.add_le(0.0);
    up.terms = {{a0, 1.0 - xr}, {a1, -(1.0 - xr)}, {b0, xr}, {b1, -xr}};
    // Belief x_l prefers predicting x_l over x_{l+1}.
    auto& down = p.add_le(0.0);
    down.terms = {{a0, -(1.0 - xl)}, {a1, 1.0 - xl}, {b0, -xl}, {b1, xl}};
  }
  LpSolution sol = solve_lp(p);
  if (sol.status != LpStatus::kOptimal) {
    throw InternalError("score maximization did not reach an optimum");
  }
  ScoreLpResult result;
  result.value = sol.objective_value;
  result.witness.knots = knots;
  result.witness.potential.resize(n);
  result.witness.slope.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double a = sol.x[j];
    double b = sol.x[n + j];
    result.witness.potential[j] = (1.0 - knots[j]) * a + knots[j] * b;
    result.witness.slope[j] = b - a;
  }
  // At an optimal vertex, tight propriety rows make two tangents of
  // different slope meet at a knot.  Evaluation breaks such ties toward the
  // lowest index, which would score a report at that knot with the other
  // tangent's endpoint values.  Lift each tied potential a hair above the
  // competing envelope so every knot's own tangent wins its evaluation;
  // identical (coinciding) tangents are left alone.  The witness then
  // reproduces the optimum within a few 1e-12 per knot.
  constexpr double kTieEps = 1e-12;
  constexpr double kCoincide = 1e-9;
  ProperScore& w = result.witness;
  for (int sweep = 0; sweep < 32; ++sweep) {
    bool nudged = false;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t i = envelope_argmax(w, w.knots[j]);
      if (i == j) continue;
      double vi = w.potential[i] + w.slope[i] * (w.knots[j] - w.knots[i]);
      if (std::fabs(vi - w.potential[j]) <= kCoincide &&
          std::fabs(w.slope[i] - w.slope[j]) <= kCoincide) {
        continue;
      }
      w.potential[j] = vi + kTieEps;
      nudged = true;
    }
    if (!nudged) break;
  }
  return result;
}

}  // namespace dcal
