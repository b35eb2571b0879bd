// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "dcal/error.hpp"

namespace dcal {

GridSpec GridSpec::cells(int m) {
  if (m < 1) throw InputError("grid must have at least one cell");
  return GridSpec{m};
}

double GridSpec::floor_to(double p) const {
  // Find the largest i with i/m <= p using comparisons against the grid
  // points themselves, so values sitting exactly on a grid point stay put
  // even when p * m rounds below an integer.
  int i = static_cast<int>(std::floor(p * m));
  i = std::max(0, std::min(i, m));
  while (i + 1 <= m && point(i + 1) <= p) ++i;
  while (i > 0 && point(i) > p) --i;
  return point(i);
}

double GridSpec::nearest_to(double p) const {
  double lo = floor_to(p);
  int i = static_cast<int>(std::llround(lo * m));
  if (i >= m) return point(m);
  double hi = point(i + 1);
  return (p - lo < hi - p) ? lo : hi;  // ties round up
}

namespace {

void check_sample(const Sample& s) {
  if (!(s.prediction >= 0.0 && s.prediction <= 1.0) ||
      (s.state != 0 && s.state != 1) ||
      !(s.weight >= 0.0) || !std::isfinite(s.weight)) {
    throw InputError("domain violation");
  }
}

}  // namespace

std::vector<Sample> EmpiricalJoint::atoms() const {
  std::vector<Sample> out;
  out.reserve(2 * values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mass0_[i] > 0.0) out.push_back({values_[i], 0, mass0_[i]});
    if (mass1_[i] > 0.0) out.push_back({values_[i], 1, mass1_[i]});
  }
  return out;
}

EmpiricalJoint build_joint(const std::vector<Sample>& samples) {
  // Aggregate by exact prediction value (callers wanting fuzzy merging
  // snap first).  std::map keys on the exact double.
  std::map<double, std::pair<double, double>> acc;  // value -> (m1, m0)
  for (const Sample& s : samples) {
    check_sample(s);
    auto& slot = acc[s.prediction];
    (s.state == 1 ? slot.first : slot.second) += s.weight;
  }
  double total = 0.0;
  for (const auto& [value, masses] : acc) {
    total += masses.first + masses.second;
  }
  if (!(total > 0.0)) throw InputError("empty distribution");

  EmpiricalJoint joint;
  for (const auto& [value, masses] : acc) {
    double w = masses.first + masses.second;
    if (w <= 0.0) continue;  // zero-mass value contributes to no expectation
    joint.values_.push_back(value);
    joint.mass1_.push_back(masses.first / total);
    joint.mass0_.push_back(masses.second / total);
  }
  return joint;
}

EmpiricalJoint joint_from_posteriors(const std::vector<double>& values,
                                     const std::vector<double>& posteriors,
                                     const std::vector<double>& weights) {
  if (values.size() != posteriors.size() || values.size() != weights.size()) {
    throw InputError("domain violation");
  }
  std::vector<Sample> samples;
  samples.reserve(2 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(posteriors[i] >= 0.0 && posteriors[i] <= 1.0)) {
      throw InputError("domain violation");
    }
    samples.push_back({values[i], 1, weights[i] * posteriors[i]});
    samples.push_back({values[i], 0, weights[i] * (1.0 - posteriors[i])});
  }
  return build_joint(samples);
}

EmpiricalJoint snap_to_grid(const EmpiricalJoint& joint, const GridSpec& grid,
                            SnapMode mode) {
  std::vector<Sample> snapped;
  snapped.reserve(2 * joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double v = mode == SnapMode::kFloor ? grid.floor_to(joint.value(i))
                                        : grid.nearest_to(joint.value(i));
    snapped.push_back({v, 1, joint.mass1()[i]});
    snapped.push_back({v, 0, joint.mass0()[i]});
  }
  return build_joint(snapped);
}

Coupling build_coupling(std::vector<CouplingAtom> atoms) {
  double total = 0.0;
  for (const CouplingAtom& a : atoms) {
    if (!(a.q >= 0.0 && a.q <= 1.0) || !(a.b >= 0.0 && a.b <= 1.0) ||
        (a.state != 0 && a.state != 1) || !(a.mass >= 0.0) ||
        !std::isfinite(a.mass)) {
      throw InputError("domain violation");
    }
    total += a.mass;
  }
  if (!(total > 0.0)) throw InputError("empty distribution");

  std::sort(atoms.begin(), atoms.end(),
            [](const CouplingAtom& x, const CouplingAtom& y) {
              if (x.q != y.q) return x.q < y.q;
              if (x.b != y.b) return x.b < y.b;
              return x.state < y.state;
            });
  Coupling c;
  for (const CouplingAtom& a : atoms) {
    if (a.mass <= 0.0) continue;
    if (!c.atoms_.empty()) {
      CouplingAtom& last = c.atoms_.back();
      if (last.q == a.q && last.b == a.b && last.state == a.state) {
        last.mass += a.mass / total;
        continue;
      }
    }
    c.atoms_.push_back({a.q, a.b, a.state, a.mass / total});
  }
  return c;
}

EmpiricalJoint coupling_marginal(const Coupling& c, CouplingSide side) {
  std::vector<Sample> samples;
  samples.reserve(c.size());
  for (const CouplingAtom& a : c.atoms()) {
    samples.push_back({side == CouplingSide::kQ ? a.q : a.b, a.state, a.mass});
  }
  return build_joint(samples);
}

}  // namespace dcal
