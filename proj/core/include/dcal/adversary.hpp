// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dcal/model.hpp"
#include "dcal/postprocess.hpp"

namespace dcal {

// The tight batch instance: a coupling of predictions Q at 1/2 +- sqrt(eps)
// with a calibrated reference B, at expected distance exactly eps.
struct BatchLbInstance {
  double epsilon = 0.0;
  Coupling coupling;        // full (q, b, state) law; dist(coupling) = eps
  EmpiricalJoint q_marginal;
  EmpiricalJoint q_tilde;   // q replaced by its posterior (the Bayes collapse)
};

// eps must lie in (0, 1/16] so every probability stays inside (0, 1).
// Atoms: mass 1 - sqrt(eps) on matched pairs (q, b) = (1/2 -+ sqrt(eps),
// same) with states Bernoulli(b); mass sqrt(eps) split between
// (1/2 - sqrt(eps), 1/2, state 1) and (1/2 + sqrt(eps), 1/2, state 0).
BatchLbInstance make_batch_lb(double epsilon);

// Replaces each atom's q by the posterior of q under the coupling's own
// q-marginal; the collapsed q-marginal is perfectly calibrated.
Coupling collapse_to_posterior(const Coupling& c);

// Two prediction sequences of 2T rounds that agree for the first T rounds;
// no state-blind post-processor does well on both.
struct OnlineLbPair {
  long long T = 0;
  double epsilon = 0.0;
  std::vector<double> seq_q;       // T rounds at 1/2-sqrt(eps), T at +
  std::vector<int> seq_theta;      // block one-counts T(1/2 -+ sqrt(eps)/2 +- eps)
  std::vector<double> seq_q2;      // all 2T rounds at 1/2-sqrt(eps)
  std::vector<int> seq_theta2;     // 2T(1/2 - sqrt(eps) - eps) ones
};

// The three block one-counts must be integral (within 1e-9) at (T, eps);
// otherwise throws InputError naming the smallest compatible T >= requested.
// State positions within each block are a seeded shuffle: the construction
// constrains only the counts, and shuffling exposes post-processors that
// try to exploit ordering.
OnlineLbPair make_online_lb(long long T, double epsilon,
                            std::uint64_t seed = 0);

// Monte Carlo evaluation of a post-processor on both sequences.
struct LbPairEval {
  double mean_ece_1 = 0.0, mean_ece_2 = 0.0;
  double mean_cdl_1 = 0.0, mean_cdl_2 = 0.0;  // cdl_vshape
  double stderr_ece_1 = 0.0, stderr_ece_2 = 0.0;
  double stderr_cdl_1 = 0.0, stderr_cdl_2 = 0.0;
  double max_of_means_ece = 0.0;
  double max_of_means_cdl = 0.0;
  double stderr_at_max_ece = 0.0;  // stderr of the sequence attaining the max
  double stderr_at_max_cdl = 0.0;
};

// Runs pp `trials` times on each sequence with independent derived seeds
// and reports the means, standard errors, and max-of-means.
LbPairEval eval_lb_pair(const OnlineLbPair& pair, PostProcessor& pp,
                        int trials, std::uint64_t seed);

}  // namespace dcal
