// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dcal/model.hpp"
#include "dcal/noise.hpp"
#include "dcal/rng.hpp"

namespace dcal {

// Mutable per-run state of the privacy-based online algorithm: noise the
// incoming prediction, then snap to the grid {i/m} with m = ceil(T^{1/3}).
// Single-owner; parallel trials each hold their own state.
struct OnlineState {
  NoiseMechanism mech;
  long long horizon = 0;
  GridSpec grid;
  long long round = 0;
  Rng rng;

  OnlineState(const NoiseMechanism& mech_in, long long horizon_in,
              std::uint64_t seed);
};

// ceil(T^{1/3}), with cube-root results within 1e-9 of an integer snapped
// to it first (cbrt(1000) evaluates just below 10).
int online_grid_cells(long long horizon);

// One round: draw p' ~ mech(q), emit the largest grid point <= p'.
// Throws InputError("horizon exceeded") past T rounds.
double online_step(OnlineState& state, double q);

// A state-blind post-processing strategy: it sees only the predictions, in
// order, and never the binary states -- the interface has no way to receive
// them.  Implementations may keep history between step() calls.
class PostProcessor {
 public:
  virtual ~PostProcessor() = default;

  virtual std::string name() const = 0;

  // Reset internal state for a run of `horizon` rounds.  run_online calls
  // this before the first step.
  virtual void begin_run(long long horizon) { (void)horizon; }

  // Replace the seed used by subsequent begin_run resets; no-op for
  // deterministic post-processors.
  virtual void reseed(std::uint64_t seed) { (void)seed; }

  // The prediction emitted for this round's q; must lie in [0, 1].
  virtual double step(double q) = 0;
};

// Built-in post-processors.
std::unique_ptr<PostProcessor> make_identity_pp();
std::unique_ptr<PostProcessor> make_constant_pp(double c);
// Maps q to the posterior of the nearest value of `source` (exact lookups in
// practice): the state-blind Bayes responder of the lower-bound arguments.
std::unique_ptr<PostProcessor> make_posterior_map_pp(
    const EmpiricalJoint& source);
// The privacy-based online algorithm; begin_run rebuilds its OnlineState
// from (mech, seed, horizon).
std::unique_ptr<PostProcessor> make_privacy_online_pp(
    const NoiseMechanism& mech, std::uint64_t seed);

// Kind names accepted by make_postprocessor, in the spec grammar
// "identity" | "constant:c=<v>" | "posterior_map" |
// "privacy_online:<mechanism spec>".
std::vector<std::string> builtin_postprocessors();

// posterior_map requires a source joint; other kinds ignore it.
std::unique_ptr<PostProcessor> make_postprocessor(
    const std::string& spec, const EmpiricalJoint* posterior_source,
    std::uint64_t seed);

// Metrics of the post-processed empirical joint.
struct OnlineReport {
  double ece = 0.0;
  double cdl_vshape = 0.0;
  double cdl_vshape_mu = 0.0;
  double cdl_lp = 0.0;
};

struct OnlineRunResult {
  std::vector<double> ps;
  OnlineReport report;
};

// Feeds qs to pp one round at a time, collects the emitted ps, then scores
// the joint of (p_t, theta_t).  The states are touched only after every
// prediction is made, so pp cannot observe them even in principle.
OnlineRunResult run_online(PostProcessor& pp, const std::vector<double>& qs,
                           const std::vector<int>& thetas);

// How batch_apply pushes the joint through the mechanism.  Both kinds land
// on the cell centers of `bins` uniform cells so their outputs are directly
// comparable.
struct BatchMode {
  enum class Kind { kAnalytic, kMonteCarlo };
  Kind kind = Kind::kAnalytic;
  int bins = 1000;         // uniform output cells
  long long n = 100000;    // montecarlo: draws per unit mass
  std::uint64_t seed = 0;  // montecarlo

  static BatchMode analytic(int bins = 1000);
  static BatchMode montecarlo(long long n, std::uint64_t seed);
};

// The batch algorithm p ~ M(q).  Analytic mode lays each value's noise
// density across the cells (mass = w_i * integral of f_{x_i} over the cell,
// split by the input posterior), exact up to binning; montecarlo mode draws
// round(n * w_i) samples per value, bin-snapped, with states resampled from
// Bernoulli(posterior_i).
EmpiricalJoint batch_apply(const NoiseMechanism& mech,
                           const EmpiricalJoint& joint, const BatchMode& mode);

// Extends a (q, b, state) coupling through the mechanism analytically: each
// atom's q spreads over the `bins` cell centers with CDF-difference masses,
// b and state unchanged.
Coupling pushforward_coupling(const NoiseMechanism& mech, const Coupling& c,
                              int bins);

}  // namespace dcal
