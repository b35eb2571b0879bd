// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dcal/error.hpp"
#include "dcal/metrics.hpp"
#include "dcal/rng.hpp"

namespace dcal {

namespace {

constexpr double kCountSnapTol = 1e-9;
constexpr long long kCompatibleTWindow = 1000000;

void require_lb_eps(double eps) {
  if (!(eps > 0.0) || !(eps <= 0.0625)) {
    throw InputError("adversarial epsilon out of (0, 1/16]");
  }
}

// The three block one-counts of the online pair at (T, eps), or -1 for a
// non-integral count.
struct BlockCounts {
  long long ones1 = -1;  // first block of sequence 1 (T rounds at lo)
  long long ones2 = -1;  // second block of sequence 1 (T rounds at hi)
  long long ones_s2 = -1;  // all 2T rounds of sequence 2
  bool ok() const { return ones1 >= 0 && ones2 >= 0 && ones_s2 >= 0; }
};

long long snap_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > kCountSnapTol) return -1;
  return static_cast<long long>(r);
}

BlockCounts block_counts(long long t, double eps) {
  const double r = std::sqrt(eps);
  const double td = static_cast<double>(t);
  BlockCounts c;
  c.ones1 = snap_count(td * (0.5 - r / 2.0 + eps));
  c.ones2 = snap_count(td * (0.5 + r / 2.0 - eps));
  c.ones_s2 = snap_count(2.0 * td * (0.5 - r - eps));
  return c;
}

// `k` ones and `n - k` zeros, order shuffled by `seed`.
std::vector<int> shuffled_block(long long n, long long k, std::uint64_t seed) {
  std::vector<int> block(static_cast<std::size_t>(n), 0);
  std::fill_n(block.begin(), static_cast<std::size_t>(k), 1);
  Rng rng(seed);
  rng.shuffle(block);
  return block;
}

struct MeanErr {
  double mean = 0.0;
  double se = 0.0;
};

MeanErr summarize(const std::vector<double>& xs) {
  MeanErr out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n * (n - 1.0)));
  return out;
}

}  // namespace

BatchLbInstance make_batch_lb(double epsilon) {
  require_lb_eps(epsilon);
  const double r = std::sqrt(epsilon);
  const double lo = 0.5 - r;
  const double hi = 0.5 + r;
  const double half = (1.0 - r) / 2.0;
  Coupling coupling = build_coupling({{lo, lo, 1, half * lo},
                                      {lo, lo, 0, half * (1.0 - lo)},
                                      {hi, hi, 1, half * hi},
                                      {hi, hi, 0, half * (1.0 - hi)},
                                      {lo, 0.5, 1, r / 2.0},
                                      {hi, 0.5, 0, r / 2.0}});
  EmpiricalJoint q_marginal = coupling_marginal(coupling, CouplingSide::kQ);
  EmpiricalJoint q_tilde =
      coupling_marginal(collapse_to_posterior(coupling), CouplingSide::kQ);
  return BatchLbInstance{epsilon, std::move(coupling), std::move(q_marginal),
                         std::move(q_tilde)};
}

Coupling collapse_to_posterior(const Coupling& c) {
  const EmpiricalJoint qm = coupling_marginal(c, CouplingSide::kQ);
  std::map<double, double> posterior_of;
  for (std::size_t i = 0; i < qm.values().size(); ++i) {
    posterior_of[qm.value(i)] = qm.posterior(i);
  }
  std::vector<CouplingAtom> atoms = c.atoms();
  for (CouplingAtom& a : atoms) a.q = posterior_of.at(a.q);
  return build_coupling(std::move(atoms));
}

OnlineLbPair make_online_lb(long long T, double epsilon, std::uint64_t seed) {
  if (T < 1) throw InputError("horizon must be positive");
  require_lb_eps(epsilon);
  BlockCounts c = block_counts(T, epsilon);
  if (!c.ok()) {
    const std::string head =
        "state counts not integral at T=" + std::to_string(T) + "; ";
    for (long long t = T + 1; t <= T + kCompatibleTWindow; ++t) {
      if (block_counts(t, epsilon).ok()) {
        throw InputError(head + "smallest compatible T is " +
                         std::to_string(t));
      }
    }
    throw InputError(head + "no compatible T within " +
                     std::to_string(kCompatibleTWindow) + " of the request");
  }

  const double r = std::sqrt(epsilon);
  OnlineLbPair pair;
  pair.T = T;
  pair.epsilon = epsilon;
  const std::size_t t = static_cast<std::size_t>(T);
  pair.seq_q.assign(2 * t, 0.5 - r);
  std::fill(pair.seq_q.begin() + t, pair.seq_q.end(), 0.5 + r);
  pair.seq_q2.assign(2 * t, 0.5 - r);

  // Only the per-block one-counts are determined by the construction; the
  // order within each block is a seeded shuffle.
  const std::vector<int> b1 = shuffled_block(T, c.ones1, derive_seed(seed, 1));
  const std::vector<int> b2 = shuffled_block(T, c.ones2, derive_seed(seed, 2));
  pair.seq_theta = b1;
  pair.seq_theta.insert(pair.seq_theta.end(), b2.begin(), b2.end());
  pair.seq_theta2 = shuffled_block(2 * T, c.ones_s2, derive_seed(seed, 3));
  return pair;
}

LbPairEval eval_lb_pair(const OnlineLbPair& pair, PostProcessor& pp,
                        int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("trials must be positive");
  std::vector<double> ece1, ece2, cdl1, cdl2;
  ece1.reserve(trials);
  ece2.reserve(trials);
  cdl1.reserve(trials);
  cdl2.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    pp.reseed(derive_seed(seed, static_cast<std::uint64_t>(t), 1));
    const OnlineRunResult r1 = run_online(pp, pair.seq_q, pair.seq_theta);
    pp.reseed(derive_seed(seed, static_cast<std::uint64_t>(t), 2));
    const OnlineRunResult r2 = run_online(pp, pair.seq_q2, pair.seq_theta2);
    ece1.push_back(r1.report.ece);
    ece2.push_back(r2.report.ece);
    cdl1.push_back(r1.report.cdl_vshape);
    cdl2.push_back(r2.report.cdl_vshape);
  }
  const MeanErr e1 = summarize(ece1), e2 = summarize(ece2);
  const MeanErr c1 = summarize(cdl1), c2 = summarize(cdl2);
  LbPairEval out;
  out.mean_ece_1 = e1.mean;
  out.mean_ece_2 = e2.mean;
  out.mean_cdl_1 = c1.mean;
  out.mean_cdl_2 = c2.mean;
  out.stderr_ece_1 = e1.se;
  out.stderr_ece_2 = e2.se;
  out.stderr_cdl_1 = c1.se;
  out.stderr_cdl_2 = c2.se;
  out.max_of_means_ece = std::max(e1.mean, e2.mean);
  out.stderr_at_max_ece = e1.mean >= e2.mean ? e1.se : e2.se;
  out.max_of_means_cdl = std::max(c1.mean, c2.mean);
  out.stderr_at_max_cdl = c1.mean >= c2.mean ? c1.se : c2.se;
  return out;
}

}  // namespace dcal
