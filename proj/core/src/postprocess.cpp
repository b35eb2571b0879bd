// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include "dcal/emit.hpp"
#include "dcal/error.hpp"
#include "dcal/metrics.hpp"

namespace dcal {

int online_grid_cells(long long horizon) {
  if (horizon < 1) throw InputError("horizon must be positive");
  double c = std::cbrt(static_cast<double>(horizon));
  double r = std::round(c);
  if (std::abs(c - r) <= 1e-9) return static_cast<int>(r);
  return static_cast<int>(std::ceil(c));
}

OnlineState::OnlineState(const NoiseMechanism& mech_in, long long horizon_in,
                         std::uint64_t seed)
    : mech(mech_in),
      horizon(horizon_in),
      grid(GridSpec::cells(online_grid_cells(horizon_in))),
      rng(seed) {}

double online_step(OnlineState& state, double q) {
  if (state.round >= state.horizon) throw InputError("horizon exceeded");
  double noised = sample(state.mech, q, state.rng);
  ++state.round;
  return state.grid.floor_to(noised);
}

namespace {

class IdentityPp final : public PostProcessor {
 public:
  std::string name() const override { return "identity"; }
  double step(double q) override { return q; }
};

class ConstantPp final : public PostProcessor {
 public:
  explicit ConstantPp(double c) : c_(c) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw InputError("constant post-processor value out of [0,1]");
    }
  }
  std::string name() const override { return "constant(" + format_g12(c_) + ")"; }
  double step(double) override { return c_; }

 private:
  double c_;
};

class PosteriorMapPp final : public PostProcessor {
 public:
  explicit PosteriorMapPp(const EmpiricalJoint& source)
      : values_(source.values()) {
    posteriors_.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
      posteriors_.push_back(source.posterior(i));
    }
  }
  std::string name() const override { return "posterior_map"; }
  double step(double q) override {
    // Nearest source value (lower value wins ties); lookups are exact when
    // q comes from the source's own support.
    auto it = std::lower_bound(values_.begin(), values_.end(), q);
    if (it == values_.end()) return posteriors_.back();
    std::size_t hi = static_cast<std::size_t>(it - values_.begin());
    if (hi == 0) return posteriors_.front();
    return q - values_[hi - 1] <= values_[hi] - q ? posteriors_[hi - 1]
                                                  : posteriors_[hi];
  }

 private:
  std::vector<double> values_;
  std::vector<double> posteriors_;
};

class PrivacyOnlinePp final : public PostProcessor {
 public:
  PrivacyOnlinePp(const NoiseMechanism& mech, std::uint64_t seed)
      : mech_(mech), seed_(seed) {}
  std::string name() const override {
    return "privacy_online(" + spec_string(mech_) + ")";
  }
  void begin_run(long long horizon) override {
    state_.emplace(mech_, horizon, seed_);
  }
  void reseed(std::uint64_t seed) override { seed_ = seed; }
  double step(double q) override {
    if (!state_.has_value()) {
      throw InputError("privacy_online requires begin_run before step");
    }
    return online_step(*state_, q);
  }

 private:
  NoiseMechanism mech_;
  std::uint64_t seed_;
  std::optional<OnlineState> state_;
};

}  // namespace

std::unique_ptr<PostProcessor> make_identity_pp() {
  return std::make_unique<IdentityPp>();
}

std::unique_ptr<PostProcessor> make_constant_pp(double c) {
  return std::make_unique<ConstantPp>(c);
}

std::unique_ptr<PostProcessor> make_posterior_map_pp(
    const EmpiricalJoint& source) {
  return std::make_unique<PosteriorMapPp>(source);
}

std::unique_ptr<PostProcessor> make_privacy_online_pp(
    const NoiseMechanism& mech, std::uint64_t seed) {
  return std::make_unique<PrivacyOnlinePp>(mech, seed);
}

std::vector<std::string> builtin_postprocessors() {
  return {"identity", "constant", "posterior_map", "privacy_online"};
}

std::unique_ptr<PostProcessor> make_postprocessor(
    const std::string& spec, const EmpiricalJoint* posterior_source,
    std::uint64_t seed) {
  if (spec == "identity") return make_identity_pp();
  if (spec == "posterior_map") {
    if (posterior_source == nullptr) {
      throw InputError("posterior_map requires a source joint");
    }
    return make_posterior_map_pp(*posterior_source);
  }
  const std::string constant_prefix = "constant:c=";
  if (spec.rfind(constant_prefix, 0) == 0) {
    std::string value = spec.substr(constant_prefix.size());
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception&) {
      throw InputError("bad post-processor spec: " + spec);
    }
    if (used != value.size()) {
      throw InputError("bad post-processor spec: " + spec);
    }
    return make_constant_pp(c);
  }
  const std::string online_prefix = "privacy_online:";
  if (spec.rfind(online_prefix, 0) == 0) {
    return make_privacy_online_pp(
        parse_mech_spec(spec.substr(online_prefix.size())), seed);
  }
  throw InputError("unknown post-processor: " + spec);
}

OnlineRunResult run_online(PostProcessor& pp, const std::vector<double>& qs,
                           const std::vector<int>& thetas) {
  if (qs.size() != thetas.size()) throw InputError("length mismatch");
  if (qs.empty()) throw InputError("empty sequence");
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) throw InputError("domain violation");
  }
  for (int t : thetas) {
    if (t != 0 && t != 1) throw InputError("domain violation");
  }
  OnlineRunResult out;
  out.ps.reserve(qs.size());
  pp.begin_run(static_cast<long long>(qs.size()));
  for (double q : qs) {
    double p = pp.step(q);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("post-processor output out of [0,1]");
    }
    out.ps.push_back(p);
  }
  // Only now do the states enter: the run above could not have seen them.
  std::vector<Sample> samples;
  samples.reserve(qs.size());
  for (std::size_t t = 0; t < qs.size(); ++t) {
    samples.push_back({out.ps[t], thetas[t], 1.0});
  }
  EmpiricalJoint joint = build_joint(samples);
  CdlVshapeResult vs = cdl_vshape(joint);
  out.report.ece = ece(joint);
  out.report.cdl_vshape = vs.value;
  out.report.cdl_vshape_mu = vs.mu;
  out.report.cdl_lp = cdl_lp(joint);
  return out;
}

BatchMode BatchMode::analytic(int bins) {
  BatchMode m;
  m.kind = Kind::kAnalytic;
  m.bins = bins;
  return m;
}

BatchMode BatchMode::montecarlo(long long n, std::uint64_t seed) {
  BatchMode m;
  m.kind = Kind::kMonteCarlo;
  m.n = n;
  m.seed = seed;
  return m;
}

namespace {

// CDF-difference masses of mech centered at q across `bins` uniform cells;
// analytic monotonicity can leave -1e-19-scale residue, clamped away.
std::vector<double> cell_masses(const NoiseMechanism& mech, double q,
                                int bins) {
  std::vector<double> cells(bins);
  double prev = cdf(mech, q, 0.0);
  for (int j = 0; j < bins; ++j) {
    double edge = static_cast<double>(j + 1) / bins;
    double cur = cdf(mech, q, edge);
    cells[j] = std::max(cur - prev, 0.0);
    prev = cur;
  }
  return cells;
}

double cell_center(int j, int bins) { return (j + 0.5) / bins; }

int containing_cell(double x, int bins) {
  int j = static_cast<int>(std::floor(x * bins));
  return std::clamp(j, 0, bins - 1);
}

}  // namespace

EmpiricalJoint batch_apply(const NoiseMechanism& mech,
                           const EmpiricalJoint& joint, const BatchMode& mode) {
  if (mode.kind == BatchMode::Kind::kAnalytic) {
    if (mode.bins < 10) throw InputError("bins must be at least 10");
    std::vector<Sample> samples;
    if (mech.kind == NoiseKind::kPoint) {
      for (std::size_t i = 0; i < joint.size(); ++i) {
        double c = cell_center(containing_cell(joint.value(i), mode.bins),
                               mode.bins);
        samples.push_back({c, 1, joint.mass1()[i]});
        samples.push_back({c, 0, joint.mass0()[i]});
      }
      return build_joint(samples);
    }
    std::vector<double> out1(mode.bins, 0.0);
    std::vector<double> out0(mode.bins, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      std::vector<double> cells = cell_masses(mech, joint.value(i), mode.bins);
      for (int j = 0; j < mode.bins; ++j) {
        out1[j] += joint.mass1()[i] * cells[j];
        out0[j] += joint.mass0()[i] * cells[j];
      }
    }
    for (int j = 0; j < mode.bins; ++j) {
      if (out1[j] + out0[j] > 0.0) {
        double c = cell_center(j, mode.bins);
        samples.push_back({c, 1, out1[j]});
        samples.push_back({c, 0, out0[j]});
      }
    }
    return build_joint(samples);
  }
  if (mode.n < 1) throw InputError("montecarlo draws must be positive");
  if (mode.bins < 10) throw InputError("bins must be at least 10");
  Rng rng(mode.seed);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    long long draws = std::llround(static_cast<double>(mode.n) *
                                   joint.weight(i));
    double post = joint.posterior(i);
    for (long long d = 0; d < draws; ++d) {
      double p = sample(mech, joint.value(i), rng);
      int state = rng.bernoulli(post) ? 1 : 0;
      // Draws land on the same cell centers as analytic mode; calibration
      // metrics of an unbinned continuum of singleton atoms are degenerate
      // (every posterior is 0 or 1).
      samples.push_back(
          {cell_center(containing_cell(p, mode.bins), mode.bins), state, 1.0});
    }
  }
  if (samples.empty()) {
    throw InputError("montecarlo draws round to zero for every value");
  }
  return build_joint(samples);
}

Coupling pushforward_coupling(const NoiseMechanism& mech, const Coupling& c,
                              int bins) {
  if (bins < 10) throw InputError("bins must be at least 10");
  std::vector<CouplingAtom> out;
  if (mech.kind == NoiseKind::kPoint) {
    for (const CouplingAtom& a : c.atoms()) {
      out.push_back({cell_center(containing_cell(a.q, bins), bins), a.b,
                     a.state, a.mass});
    }
    return build_coupling(std::move(out));
  }
  std::map<double, std::vector<double>> cache;
  for (const CouplingAtom& a : c.atoms()) {
    auto it = cache.find(a.q);
    if (it == cache.end()) {
      it = cache.emplace(a.q, cell_masses(mech, a.q, bins)).first;
    }
    const std::vector<double>& cells = it->second;
    for (int j = 0; j < bins; ++j) {
      if (cells[j] > 0.0) {
        out.push_back({cell_center(j, bins), a.b, a.state, a.mass * cells[j]});
      }
    }
  }
  return build_coupling(std::move(out));
}

}  // namespace dcal
