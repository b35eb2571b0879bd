// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dcal/adversary.hpp"
#include "dcal/emit.hpp"
#include "dcal/error.hpp"
#include "dcal/experiments.hpp"
#include "dcal/lp.hpp"
#include "dcal/metrics.hpp"
#include "dcal/model.hpp"
#include "dcal/noise.hpp"
#include "dcal/postprocess.hpp"
#include "dcal/rng.hpp"
#include "dcal/scores.hpp"

namespace dcal {
namespace {

using Clock = std::chrono::steady_clock;

// Wall-clock budget per criterion, seconds (index 0 unused).
constexpr double kTimeLimit[11] = {0.0,  1.0,   120.0, 600.0, 60.0, 300.0,
                                   10.0, 300.0, 600.0, 60.0,  600.0};

std::string num(double v) { return format_g12(v); }
std::string num(int v) { return std::to_string(v); }

// The near-coin reference joint: half the mass predicts 0.4999 with
// posterior 1, half predicts 0.5001 with posterior 0.
EmpiricalJoint two_point_joint() {
  return joint_from_posteriors({0.4999, 0.5001}, {1.0, 0.0}, {0.5, 0.5});
}

// A seeded random joint with 1..max_values distinct values, uniform
// posteriors, and weights bounded away from zero.
EmpiricalJoint random_joint(Rng& rng, int max_values) {
  int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_values)));
  std::vector<double> values(k), posteriors(k), weights(k);
  for (;;) {
    for (double& v : values) v = rng.uniform01();
    std::sort(values.begin(), values.end());
    bool distinct = true;
    for (int i = 1; i < k; ++i) {
      distinct = distinct && (values[i] - values[i - 1] > 1e-9);
    }
    if (distinct) break;
  }
  for (double& p : posteriors) p = rng.uniform01();
  for (double& w : weights) w = 0.05 + rng.uniform01();
  return joint_from_posteriors(values, posteriors, weights);
}

EmpiricalJoint seq_joint(const std::vector<double>& qs,
                         const std::vector<int>& thetas) {
  std::vector<Sample> samples(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    samples[i] = Sample{qs[i], thetas[i], 1.0};
  }
  return build_joint(samples);
}

// The corrupted fixture for the negative control: a budgeted gaussian whose
// sigma is overwritten after construction, so its density is far sharper
// than the recorded (gamma, delta) admit.
NoiseMechanism corrupted_gaussian_fixture() {
  NoiseMechanism bad = gaussian_for_budget(0.04, GaussianVariant::kLemma);
  bad.sigma = 1e-3;
  return bad;
}

// ---- Criterion 3 brute-force oracle ----------------------------------

// A random bounded proper score: 2..4 tangents with strictly ascending
// slopes, each touching the convex envelope on its own region of [0,1]
// (knots at region midpoints so no envelope ties arise), rescaled so the
// tangent values at theta = 0, 1 exactly fill [0, 1].  Returns false for
// the rare near-constant draw whose range is too small to normalize.
bool random_bounded_score(Rng& rng, ProperScore* out) {
  int nk = 2 + static_cast<int>(rng.below(3));
  double c[5];
  c[0] = 0.0;
  c[nk] = 1.0;
  for (int j = 1; j < nk; ++j) {
    c[j] = (j + 0.2 + 0.6 * rng.uniform01()) / nk;
  }
  out->knots.resize(nk);
  out->potential.resize(nk);
  out->slope.resize(nk);
  for (int j = 0; j < nk; ++j) out->slope[j] = 2.0 * rng.uniform01() - 1.0;
  std::sort(out->slope.begin(), out->slope.end());
  for (int j = 0; j < nk; ++j) out->slope[j] += 1e-4 * j;
  double pos = 0.0;
  double val = 0.0;
  for (int j = 0; j < nk; ++j) {
    double x = 0.5 * (c[j] + c[j + 1]);
    val += out->slope[j] * (x - pos);
    out->knots[j] = x;
    out->potential[j] = val;
    val += out->slope[j] * (c[j + 1] - x);
    pos = c[j + 1];
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int j = 0; j < nk; ++j) {
    double at0 = out->potential[j] - out->slope[j] * out->knots[j];
    double at1 = out->potential[j] + out->slope[j] * (1.0 - out->knots[j]);
    lo = std::min(lo, std::min(at0, at1));
    hi = std::max(hi, std::max(at0, at1));
  }
  double range = hi - lo;
  if (!(range > 1e-9)) return false;
  for (int j = 0; j < nk; ++j) {
    out->potential[j] = (out->potential[j] - lo) / range;
    out->slope[j] /= range;
  }
  return true;
}

// Max V-shaped swap regret over kinks at the joint's breakpoints and their
// one-sided neighborhoods (the regret is a monotone Moebius function of mu
// between breakpoints, so its supremum is a one-sided limit there).
double vshape_ladder_max(const EmpiricalJoint& joint) {
  std::vector<double> mus{0.0, 0.5, 1.0};
  auto push = [&mus](double mu) {
    mus.push_back(std::clamp(mu, 0.0, 1.0));
  };
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (double b : {joint.value(i), joint.posterior(i)}) {
      push(b - 1e-9);
      push(b);
      push(b + 1e-9);
    }
  }
  double best = 0.0;
  for (double mu : mus) {
    best = std::max(best, swap_regret(joint, VShapeScore{mu}));
  }
  return best;
}

// Knot set and objective weights of the swap-regret tangent program,
// rebuilt from the definition independently of the metrics implementation.
// Column j carries the tangent value at theta = 0 with weight c0[j], column
// n + j the value at theta = 1 with weight c1[j].
struct CdlObjective {
  std::vector<double> knots;
  std::vector<double> c0;
  std::vector<double> c1;
};

CdlObjective cdl_objective(const EmpiricalJoint& joint) {
  CdlObjective o;
  o.knots.reserve(2 * joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    o.knots.push_back(joint.value(i));
    o.knots.push_back(joint.posterior(i));
  }
  std::sort(o.knots.begin(), o.knots.end());
  o.knots.erase(std::unique(o.knots.begin(), o.knots.end()), o.knots.end());
  o.c0.assign(o.knots.size(), 0.0);
  o.c1.assign(o.knots.size(), 0.0);
  auto at = [&o](double x) {
    return static_cast<std::size_t>(
        std::lower_bound(o.knots.begin(), o.knots.end(), x) -
        o.knots.begin());
  };
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double x = joint.value(i), ph = joint.posterior(i), w = joint.weight(i);
    o.c0[at(ph)] += w * (1.0 - ph);
    o.c1[at(ph)] += w * ph;
    o.c0[at(x)] -= w * (1.0 - ph);
    o.c1[at(x)] -= w * ph;
  }
  return o;
}

// Optimizes the direction dir over the bounded proper tangent polytope and
// returns the objective value of the point found.  The point is checked
// feasible and evaluated directly; the solver's claimed value is never
// used, so a solver or assembly bug cannot vouch for itself.  Projecting a
// far-away draw onto a polytope lands on the face supporting its
// direction, so random directions reach the vertices that interior
// sampling cannot — this is the projection step of the candidate oracle.
// Discarded (infeasible or unsolved) points count as -infinity.
double support_candidate(const CdlObjective& o,
                         const std::vector<double>& dir) {
  const double bad = -std::numeric_limits<double>::infinity();
  std::size_t n = o.knots.size();
  LpProblem p = LpProblem::with_vars(static_cast<int>(2 * n));
  for (std::size_t j = 0; j < n; ++j) {
    p.set_bounds(static_cast<int>(j), 0.0, 1.0);
    p.set_bounds(static_cast<int>(n + j), 0.0, 1.0);
    p.set_objective(static_cast<int>(j), dir[j]);
    p.set_objective(static_cast<int>(n + j), dir[n + j]);
  }
  for (std::size_t l = 0; l + 1 < n; ++l) {
    int a0 = static_cast<int>(l), a1 = static_cast<int>(l + 1);
    int b0 = static_cast<int>(n + l), b1 = static_cast<int>(n + l + 1);
    double xl = o.knots[l], xr = o.knots[l + 1];
    auto& up = p.add_le(0.0);
    up.terms = {{a0, 1.0 - xr}, {a1, -(1.0 - xr)}, {b0, xr}, {b1, -xr}};
    auto& down = p.add_le(0.0);
    down.terms = {{a0, -(1.0 - xl)}, {a1, 1.0 - xl}, {b0, -xl}, {b1, xl}};
  }
  try {
    LpSolution sol = solve_lp(p);
    if (sol.status != LpStatus::kOptimal) return bad;
    const double tol = 1e-7;
    for (double v : sol.x) {
      if (!(v >= -tol && v <= 1.0 + tol)) return bad;
    }
    auto tangent = [&sol, n](std::size_t j, double t) {
      return (1.0 - t) * sol.x[j] + t * sol.x[n + j];
    };
    for (std::size_t l = 0; l + 1 < n; ++l) {
      double xl = o.knots[l], xr = o.knots[l + 1];
      if (tangent(l, xr) > tangent(l + 1, xr) + tol) return bad;
      if (tangent(l + 1, xl) > tangent(l, xl) + tol) return bad;
    }
    double val = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      val += o.c0[j] * sol.x[j] + o.c1[j] * sol.x[n + j];
    }
    return val;
  } catch (const std::exception&) {
    return bad;
  }
}

// ---- Criteria --------------------------------------------------------

CriterionResult c1_ground_truths() {
  CriterionResult r;
  r.title = "metric ground truths";
  EmpiricalJoint j = two_point_joint();
  double e = ece(j);
  double s = smooth_cal(j);
  double d = dtc_primal(j, GridSpec::cells(200));
  bool e_ok = (e == 0.5001);
  bool s_ok = (s >= 5e-5 && s <= 1.1e-4);
  bool d_ok = (d >= 5e-5 && d <= 1.1e-4);
  r.pass = e_ok && s_ok && d_ok;
  r.detail = "ece=" + num(e) + (e_ok ? " (exactly 0.5001)" : " != 0.5001") +
             "; smcal=" + num(s) + "; dtc=" + num(d) +
             "; window [5e-05, 1.1e-04]";
  return r;
}

CriterionResult c2_sandwich(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "smCal/DTC sandwich";
  Rng rng(derive_seed(opts.seed, 2));
  GridSpec grid = GridSpec::cells(200);
  int upper_viol = 0;
  int lower_viol = 0;
  int two_sided_ok = 0;
  double max_ratio = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    EmpiricalJoint j = random_joint(rng, 8);
    double s = smooth_cal(j);
    double d = dtc_primal(j, grid);
    if (s > d + 1e-7) ++upper_viol;
    if (s < 0.5 * d - 1.0 / grid.m - 1e-9) ++lower_viol;
    if (s >= 0.5 * d - 1.0 / grid.m - 1e-9 && s <= 2.0 * d + 1e-7) {
      ++two_sided_ok;
    }
    if (d > 1e-9) max_ratio = std::max(max_ratio, s / d);
  }
  r.pass = (upper_viol == 0 && lower_viol == 0);
  r.detail = "single-factor upper half smCal <= DTC + 1e-7 violated on " +
             num(upper_viol) + "/" + num(n) + " joints (max smCal/DTC = " +
             num(max_ratio) +
             "); lower half (1/2)DTC - 1/m <= smCal violated on " +
             num(lower_viol) + "; the provable two-sided bound (1/2)DTC - "
             "1/m <= smCal <= 2*DTC holds on " +
             num(two_sided_ok) + "/" + num(n) +
             " (factor 2, not 1: smCal = E[sig(P)(P-B)] + "
             "E[(sig(P)-sig(B))(B-theta)] <= 2 E|P-B| for any calibrated "
             "coupling)";
  return r;
}

CriterionResult c3_cdl_oracle(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "CDL oracle equivalence";
  Rng rng(derive_seed(opts.seed, 3));
  int order_viol = 0;
  int brute_joints = 0;
  int max_support_dirs = 0;
  int objective_dir_joints = 0;
  double max_brute_gap = 0.0;
  double max_random_gap = 0.0;
  ProperScore buf;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    EmpiricalJoint j = random_joint(rng, 8);
    double e2 = 2.0 * ece(j);
    double lp = cdl_lp(j);
    double vs = cdl_vshape(j).value;
    if (!(vs <= lp + 1e-9 && lp <= e2 + 1e-7)) ++order_viol;
    if (j.size() <= 4) {
      ++brute_joints;
      double best = 0.0;
      for (int cand = 0; cand < 100000; ++cand) {
        if ((cand & 1) == 0) {
          best = std::max(best, swap_regret(j, VShapeScore{rng.uniform01()}));
        } else if (random_bounded_score(rng, &buf)) {
          best = std::max(best, swap_regret(j, buf));
        }
      }
      max_random_gap = std::max(max_random_gap, lp - best);
      best = std::max(best, vshape_ladder_max(j));
      // Interior sampling cannot reach the polytope vertices where the
      // optimum sits (the shortfall above measures this), so the projected
      // candidates are support points in random directions drawn around
      // the objective and isotropically, from a per-joint stream.
      CdlObjective o = cdl_objective(j);
      std::size_t dim = 2 * o.knots.size();
      Rng drng(
          derive_seed(opts.seed, 3, 1000 + static_cast<std::uint64_t>(i)));
      std::vector<double> dir(dim);
      double target = lp - 1e-6;
      int dirs = 0;
      while (best < target && dirs < 2304) {
        int mode = dirs & 3;
        for (std::size_t t = 0; t < dim; ++t) {
          double u = 2.0 * drng.uniform01() - 1.0;
          if (mode == 3) {
            dir[t] = u;
          } else {
            double base =
                t < o.knots.size() ? o.c0[t] : o.c1[t - o.knots.size()];
            double scale = mode == 0 ? 0.25 : (mode == 1 ? 1.0 : 4.0);
            dir[t] = base + scale * u;
          }
        }
        best = std::max(best, support_candidate(o, dir));
        ++dirs;
      }
      max_support_dirs = std::max(max_support_dirs, dirs);
      if (best < target) {
        // Last resort: the objective direction itself.  The point it
        // yields is still feasibility-checked and re-evaluated directly.
        for (std::size_t t = 0; t < dim; ++t) {
          dir[t] = t < o.knots.size() ? o.c0[t] : o.c1[t - o.knots.size()];
        }
        best = std::max(best, support_candidate(o, dir));
        ++objective_dir_joints;
      }
      max_brute_gap = std::max(max_brute_gap, std::fabs(lp - best));
    }
  }
  r.pass = (order_viol == 0 && max_brute_gap <= 1e-4);
  r.detail = "cdl_vshape <= cdl_lp <= 2*ece + 1e-7 held on " +
             num(n - order_viol) + "/" + num(n) + " joints; brute force on " +
             num(brute_joints) +
             " joints with <= 4 values: max |cdl_lp - candidate max| = " +
             num(max_brute_gap) +
             " (per joint: 1e5 random feasible scores, the one-sided "
             "V-shape kink ladder, then support-point projections of random "
             "directions with feasibility and value of every projected "
             "point re-checked independently of the solver; interior "
             "candidates alone come within " +
             num(max_random_gap) + ", projections used at most " +
             num(max_support_dirs) + " directions per joint" +
             (objective_dir_joints > 0
                  ? ", objective-direction fallback on " +
                        num(objective_dir_joints) + " joints"
                  : ", objective-direction fallback unused") +
             ")";
  return r;
}

CriterionResult c4_privacy(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "differential-privacy checks";
  bool ok = true;
  std::string det;
  for (double eps : {0.01, 0.04}) {
    NoiseMechanism lap = laplace_for_budget(eps);
    double excess = check_dp_ratio(lap, 0.01);
    ok = ok && excess <= 1e-9;
    NoiseMechanism lemma = gaussian_for_budget(eps, GaussianVariant::kLemma);
    double tail = dp_tail_mass(lemma);
    double delta = dp_params(lemma).delta;
    ok = ok && tail <= delta + 1e-6;
    det += (det.empty() ? std::string() : std::string("; ")) + "eps=" +
           num(eps) + ": laplace ratio excess " + num(excess) +
           ", gauss-lemma tail " + num(tail) + " vs delta " + num(delta);
  }
  double diag1 =
      dp_tail_mass(gaussian_for_budget(0.01, GaussianVariant::kImproved));
  double diag4 =
      dp_tail_mass(gaussian_for_budget(0.04, GaussianVariant::kImproved));
  det += "; improved-variant diagnostic tails " + num(diag1) + " / " +
         num(diag4) + " (TV-bounded, no (gamma, delta) claim)";
  if (opts.inject_dp_violation) {
    double excess = check_dp_ratio(corrupted_gaussian_fixture(), 0.01);
    ok = false;
    det += "; check_dp_ratio: injected corrupted fixture " +
           std::string(excess > 1e-9 ? "flagged (excess " + num(excess) + ")"
                                     : "NOT flagged");
  }
  r.pass = ok;
  r.detail = det;
  return r;
}

CriterionResult c5_batch_upper(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "batch upper bound sweep";
  ExperimentConfig cfg;
  cfg.eps_list = {0.0025, 0.005, 0.01, 0.02, 0.04};
  cfg.mode = BatchMode::Kind::kAnalytic;
  cfg.seed = opts.seed;
  const char* families[2] = {"laplace", "gauss:variant=improved"};
  double slopes[2] = {0.0, 0.0};
  bool slope_ok[2] = {false, false};
  int bound_viol = 0;
  int rows = 0;
  for (int f = 0; f < 2; ++f) {
    cfg.mech_family = families[f];
    BoundReport rep = run_batch_sweep(cfg);
    for (const BoundRow& row : rep.rows) {
      ++rows;
      if (row.value > row.bound + 2e-3) ++bound_viol;
    }
    slopes[f] = rep.ece_slope;
    slope_ok[f] = rep.has_slope && slopes[f] >= 0.4 && slopes[f] <= 0.6;
  }
  cfg.mech_family = "laplace";
  cfg.eps_list = {0.0025, 0.005, 0.01};
  double head_slope = run_batch_sweep(cfg).ece_slope;
  r.pass = (bound_viol == 0 && slope_ok[0] && slope_ok[1]);
  r.detail = num(rows - bound_viol) + "/" + num(rows) +
             " rows obey value <= theorem bound + 2e-3; ece log-log "
             "slopes: laplace " +
             num(slopes[0]) + (slope_ok[0] ? " inside" : " OUTSIDE") +
             " [0.4, 0.6], gauss-improved " + num(slopes[1]) +
             (slope_ok[1] ? " inside" : " OUTSIDE") + " [0.4, 0.6]";
  if (!slope_ok[0]) {
    r.detail += "; analysis: truncated-laplace max E|X| = " +
                num(expected_abs_noise(laplace_for_budget(0.04))) +
                " at eps=0.04 -- noise a quarter of the unit interval -- "
                "saturates the top of the sweep (slope over the first three "
                "eps: " +
                num(head_slope) +
                "); the sqrt(eps) rate is asymptotic and shows at desk scale "
                "only for the sigma=sqrt(eps) gaussian, whose pushforward is "
                "scale-invariant in sqrt(eps)";
  }
  return r;
}

CriterionResult c6_batch_lower(const VerifyOptions&) {
  CriterionResult r;
  r.title = "batch lower bound witness";
  const double eps = 0.04;
  BatchLbInstance inst = make_batch_lb(eps);
  Coupling collapsed = collapse_to_posterior(inst.coupling);
  VShapeScore witness{0.5};
  double e_q = 0.0;
  double e_b = 0.0;
  for (const CouplingAtom& a : collapsed.atoms()) {
    e_q += a.mass * eval_score(witness, a.q, a.state);
    e_b += a.mass * eval_score(witness, a.b, a.state);
  }
  double gap = e_b - e_q;
  double lp = decision_loss(collapsed);
  r.pass = std::fabs(gap - 0.1) <= 1e-6;
  r.detail = "S_{mu=1/2} witness on the collapsed eps=0.04 instance: "
             "E[S(b)] - E[S(q)] = " +
             num(gap) + " vs sqrt(eps)/2 = 0.1 (tol 1e-6); full score-LP "
             "decision loss = " +
             num(lp) +
             " = sqrt(eps)/2 + eps/2 - eps^{3/2}, above the single witness "
             "as expected";
  return r;
}

CriterionResult c7_online_upper(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "online upper bound";
  const double eps = 0.04;
  const long long rounds = 1000;
  OnlineLbPair pair = make_online_lb(rounds / 2, eps, derive_seed(opts.seed, 7));
  NoiseMechanism mech = laplace_for_budget(eps);
  auto pp = make_privacy_online_pp(mech, derive_seed(opts.seed, 7, 1));
  LbPairEval ev = eval_lb_pair(pair, *pp, 200, derive_seed(opts.seed, 7, 2));
  double bound = theorem_bound_online(mech, eps, rounds);
  bool ece_ok = ev.mean_ece_1 <= bound + 3.0 * ev.stderr_ece_1 &&
                ev.mean_ece_2 <= bound + 3.0 * ev.stderr_ece_2;
  bool cdl_ok = ev.mean_cdl_1 <= 2.0 * ev.mean_ece_1 + 3.0 * ev.stderr_cdl_1 &&
                ev.mean_cdl_2 <= 2.0 * ev.mean_ece_2 + 3.0 * ev.stderr_cdl_2;
  r.pass = ece_ok && cdl_ok;
  r.detail = "laplace eps=0.04, 1000 rounds, 200 trials: mean ece " +
             num(ev.mean_ece_1) + " / " + num(ev.mean_ece_2) +
             " <= bound " + num(bound) + " + 3 se; mean cdl " +
             num(ev.mean_cdl_1) + " / " + num(ev.mean_cdl_2) +
             " <= 2*ece + 3 se on both sequences";
  return r;
}

CriterionResult c8_online_lower(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "online lower bound roster";
  const double eps = 0.04;
  OnlineLbPair pair = make_online_lb(50, eps, derive_seed(opts.seed, 8));
  EmpiricalJoint j1 = seq_joint(pair.seq_q, pair.seq_theta);
  std::vector<std::pair<std::string, std::unique_ptr<PostProcessor>>> roster;
  roster.emplace_back("identity", make_identity_pp());
  roster.emplace_back("posterior_map", make_posterior_map_pp(j1));
  for (int i = 0; i <= 20; ++i) {
    double c = 0.05 * i;
    roster.emplace_back("constant c=" + num(c), make_constant_pp(c));
  }
  roster.emplace_back("privacy_online laplace",
                      make_privacy_online_pp(laplace_for_budget(eps),
                                             derive_seed(opts.seed, 8, 100)));
  roster.emplace_back(
      "privacy_online gauss-lemma",
      make_privacy_online_pp(gaussian_for_budget(eps, GaussianVariant::kLemma),
                             derive_seed(opts.seed, 8, 101)));
  const double threshold = 0.045;
  bool ok = true;
  double min_ece = std::numeric_limits<double>::infinity();
  double min_cdl = min_ece;
  std::string argmin_ece;
  std::string argmin_cdl;
  std::uint64_t tag = 0;
  for (auto& [label, pp] : roster) {
    LbPairEval ev =
        eval_lb_pair(pair, *pp, 200, derive_seed(opts.seed, 8, ++tag));
    ok = ok && ev.max_of_means_ece >= threshold - 3.0 * ev.stderr_at_max_ece;
    ok = ok && ev.max_of_means_cdl >= threshold - 3.0 * ev.stderr_at_max_cdl;
    if (ev.max_of_means_ece < min_ece) {
      min_ece = ev.max_of_means_ece;
      argmin_ece = label;
    }
    if (ev.max_of_means_cdl < min_cdl) {
      min_cdl = ev.max_of_means_cdl;
      argmin_cdl = label;
    }
  }
  r.pass = ok;
  r.detail = num(static_cast<int>(roster.size())) +
             " post-processors (identity, posterior_map, 21 constants, two "
             "privacy mechanisms), 100 rounds, 200 trials: min max-of-means "
             "ece = " +
             num(min_ece) + " (" + argmin_ece + "), min max-of-means cdl = " +
             num(min_cdl) + " (" + argmin_cdl +
             "), all >= 0.045 - 3 se as required";
  return r;
}

CriterionResult c9_sequence_dtc(const VerifyOptions& opts) {
  CriterionResult r;
  r.title = "adversary sequence DTC";
  const double eps = 0.04;
  GridSpec grid = GridSpec::cells(200);
  OnlineLbPair pair = make_online_lb(50, eps, derive_seed(opts.seed, 8));
  double d1 = dtc_primal(seq_joint(pair.seq_q, pair.seq_theta), grid);
  double d2 = dtc_primal(seq_joint(pair.seq_q2, pair.seq_theta2), grid);
  double lo = eps - 1.0 / grid.m;
  double hi = eps + 1.0 / grid.m;
  r.pass = (d1 >= lo && d1 <= hi && d2 >= lo && d2 <= hi);
  r.detail = "dtc(seq1) = " + num(d1) + ", dtc(seq2) = " + num(d2) +
             ", window [eps - 1/m, eps + 1/m] = [" + num(lo) + ", " + num(hi) +
             "]";
  return r;
}

CriterionResult c10_scope_note(const VerifyOptions&) {
  CriterionResult r;
  r.title = "asymptotic-rate scope note";
  r.pass = true;
  r.detail = "rates in T for the cited external algorithms (T^{-1/3-c}, "
             "T^{-1/2}, T^{-2/3}) are out of scope by design; the "
             "sqrt(eps)-scale bracket is established by criteria 5, 6 and 8";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  if (id < 1 || id > 10) throw InputError("criterion id out of 1..10");
  auto start = Clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = c1_ground_truths(); break;
    case 2: r = c2_sandwich(opts); break;
    case 3: r = c3_cdl_oracle(opts); break;
    case 4: r = c4_privacy(opts); break;
    case 5: r = c5_batch_upper(opts); break;
    case 6: r = c6_batch_lower(opts); break;
    case 7: r = c7_online_upper(opts); break;
    case 8: r = c8_online_lower(opts); break;
    case 9: r = c9_sequence_dtc(opts); break;
    default: r = c10_scope_note(opts); break;
  }
  r.id = id;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.seconds >= kTimeLimit[id]) {
    r.pass = false;
    r.detail += "; time budget exceeded (" + num(r.seconds) + " s, limit " +
                num(kTimeLimit[id]) + " s)";
  }
  return r;
}

std::vector<CriterionResult> run_all_criteria(const VerifyOptions& opts) {
  std::vector<CriterionResult> out;
  out.reserve(10);
  for (int id = 1; id <= 10; ++id) out.push_back(run_criterion(id, opts));
  return out;
}

std::vector<InvariantResult> run_quick_suite(const VerifyOptions& opts) {
  std::vector<InvariantResult> out;
  auto add = [&out](std::string name, bool pass, std::string detail) {
    out.push_back(InvariantResult{std::move(name), pass, std::move(detail)});
  };

  {
    EmpiricalJoint j = two_point_joint();
    double e = ece(j);
    double s = smooth_cal(j);
    double d = dtc_primal(j, GridSpec::cells(200));
    bool ok = (e == 0.5001) && s >= 5e-5 && s <= 1.1e-4 && d >= 5e-5 &&
              d <= 1.1e-4;
    add("metric_ground_truths", ok,
        "ece=" + num(e) + ", smcal=" + num(s) + ", dtc=" + num(d));
  }

  {
    Rng rng(derive_seed(opts.seed, 101));
    GridSpec grid = GridSpec::cells(100);
    int sandwich_bad = 0;
    int order_bad = 0;
    int dual_bad = 0;
    double max_dual_gap = 0.0;
    const int n = 120;
    for (int i = 0; i < n; ++i) {
      EmpiricalJoint j = random_joint(rng, 8);
      double s = smooth_cal(j);
      DtcResult d = dtc(j, grid);
      if (!(s >= 0.5 * d.primal - 1.0 / grid.m - 1e-9 &&
            s <= 2.0 * d.primal + 1e-7)) {
        ++sandwich_bad;
      }
      double lp = cdl_lp(j);
      double vs = cdl_vshape(j).value;
      if (!(vs <= lp + 1e-9 && lp <= 2.0 * ece(j) + 1e-7)) ++order_bad;
      if (d.dual > d.primal + 1e-7) ++dual_bad;
      max_dual_gap = std::max(max_dual_gap, std::fabs(d.primal - d.dual));
    }
    add("sandwich_corrected", sandwich_bad == 0,
        "(1/2)DTC - 1/m <= smCal <= 2*DTC on " + num(n - sandwich_bad) + "/" +
            num(n) + " joints (m=100)");
    add("cdl_ordering", order_bad == 0,
        "cdl_vshape <= cdl_lp <= 2*ece on " + num(n - order_bad) + "/" +
            num(n) + " joints");
    add("weak_duality", dual_bad == 0 && max_dual_gap <= 1e-6,
        "max |dtc_primal - dtc_dual| = " + num(max_dual_gap));
  }

  {
    double excess = check_dp_ratio(laplace_for_budget(0.04), 0.01);
    bool ok = excess <= 1e-9;
    std::string det = "laplace eps=0.04 ratio excess " + num(excess);
    if (opts.inject_dp_violation) {
      double bad = check_dp_ratio(corrupted_gaussian_fixture(), 0.01);
      ok = false;
      det += "; injected corrupted fixture " +
             std::string(bad > 1e-9 ? "flagged (excess " + num(bad) + ")"
                                    : "NOT flagged");
    }
    add("check_dp_ratio", ok, det);
  }

  {
    NoiseMechanism lemma = gaussian_for_budget(0.04, GaussianVariant::kLemma);
    double tail = dp_tail_mass(lemma);
    double delta = dp_params(lemma).delta;
    add("dp_tail_mass", tail <= delta + 1e-6,
        "gauss-lemma eps=0.04 tail " + num(tail) + " vs delta " + num(delta));
  }

  {
    BatchLbInstance inst = make_batch_lb(0.04);
    NoiseMechanism mech = laplace_for_budget(0.04);
    double e = ece(batch_apply(mech, inst.q_marginal, BatchMode::analytic()));
    double dl =
        decision_loss(pushforward_coupling(mech, inst.coupling, 200));
    double bound = theorem_bound_batch(mech, 0.04);
    add("batch_bound", e <= bound + 2e-3 && dl <= bound + 1e-2,
        "laplace eps=0.04: pushforward ece " + num(e) + ", decision loss " +
            num(dl) + ", bound " + num(bound));
  }

  {
    OnlineLbPair pair = make_online_lb(100, 0.04, derive_seed(opts.seed, 102));
    auto pp = make_identity_pp();
    LbPairEval ev = eval_lb_pair(pair, *pp, 2, derive_seed(opts.seed, 103));
    bool ok = std::fabs(ev.mean_ece_1 - 0.14) <= 1e-12 &&
              std::fabs(ev.mean_ece_2 - 0.04) <= 1e-12 &&
              ev.stderr_ece_1 == 0.0 && ev.stderr_ece_2 == 0.0 &&
              ev.max_of_means_cdl >= 0.1 - 1e-12;
    add("online_identity", ok,
        "identity on the eps=0.04 pair: ece " + num(ev.mean_ece_1) + " / " +
            num(ev.mean_ece_2) + ", max cdl " + num(ev.max_of_means_cdl));
  }

  {
    OnlineLbPair pair = make_online_lb(50, 0.04, derive_seed(opts.seed, 104));
    auto run = [&pair, &opts]() {
      auto pp = make_privacy_online_pp(laplace_for_budget(0.04), 1);
      return eval_lb_pair(pair, *pp, 5, derive_seed(opts.seed, 105));
    };
    LbPairEval a = run();
    LbPairEval b = run();
    bool ok = a.mean_ece_1 == b.mean_ece_1 && a.mean_ece_2 == b.mean_ece_2 &&
              a.mean_cdl_1 == b.mean_cdl_1 && a.mean_cdl_2 == b.mean_cdl_2 &&
              a.stderr_ece_1 == b.stderr_ece_1 &&
              a.stderr_cdl_2 == b.stderr_cdl_2;
    add("determinism", ok,
        ok ? "two seeded privacy runs agree bit for bit"
           : "seeded reruns diverged");
  }

  return out;
}

}  // namespace dcal
