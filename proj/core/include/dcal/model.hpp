// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace dcal {

// One weighted observation (prediction, binary state).
struct Sample {
  double prediction = 0.0;  // in [0, 1]
  int state = 0;            // 0 or 1
  double weight = 1.0;      // >= 0
};

// The uniform grid {i/m : i = 0..m}.
struct GridSpec {
  int m = 1;  // number of cells; the grid has m + 1 points

  static GridSpec cells(int m);

  double point(int i) const { return static_cast<double>(i) / m; }
  int num_points() const { return m + 1; }

  // Largest grid point <= p (p in [0, 1]); exact on grid points.
  double floor_to(double p) const;
  // Nearest grid point to p; ties round up.
  double nearest_to(double p) const;
};

enum class SnapMode { kFloor, kNearest };

// Finite weighted joint distribution of (prediction, state), normalized to
// total mass 1, aggregated by exact prediction value, zero-mass values
// dropped.  Immutable after construction.
class EmpiricalJoint {
 public:
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& mass1() const { return mass1_; }
  const std::vector<double>& mass0() const { return mass0_; }
  std::size_t size() const { return values_.size(); }

  double value(std::size_t i) const { return values_[i]; }
  double weight(std::size_t i) const { return mass1_[i] + mass0_[i]; }
  double posterior(std::size_t i) const {
    return mass1_[i] / (mass1_[i] + mass0_[i]);
  }

  // The per-(value, state) atoms with positive mass, ordered by value with
  // state 0 before state 1.
  std::vector<Sample> atoms() const;

  friend EmpiricalJoint build_joint(const std::vector<Sample>& samples);

 private:
  EmpiricalJoint() = default;
  std::vector<double> values_;  // strictly increasing
  std::vector<double> mass1_;
  std::vector<double> mass0_;
};

// Aggregates samples into a normalized joint.
// Throws InputError("empty distribution") on empty/zero-mass input and
// InputError("domain violation") on out-of-range prediction/state/weight.
EmpiricalJoint build_joint(const std::vector<Sample>& samples);

// Convenience constructor from per-value (value, posterior, weight) triples.
EmpiricalJoint joint_from_posteriors(const std::vector<double>& values,
                                     const std::vector<double>& posteriors,
                                     const std::vector<double>& weights);

// Replaces every value by its grid point per mode and re-aggregates.
EmpiricalJoint snap_to_grid(const EmpiricalJoint& joint, const GridSpec& grid,
                            SnapMode mode);

// One atom of a joint over (q, b, state).
struct CouplingAtom {
  double q = 0.0;
  double b = 0.0;
  int state = 0;
  double mass = 0.0;
};

// Finite weighted joint over (q, b, state) triples, normalized to mass 1,
// canonicalized (sorted by (q, b, state), duplicates merged, zero mass
// dropped).  Immutable after construction.
class Coupling {
 public:
  const std::vector<CouplingAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  friend Coupling build_coupling(std::vector<CouplingAtom> atoms);

 private:
  Coupling() = default;
  std::vector<CouplingAtom> atoms_;
};

// Validates, canonicalizes and normalizes coupling atoms; same error
// contract as build_joint.
Coupling build_coupling(std::vector<CouplingAtom> atoms);

enum class CouplingSide { kQ, kB };

// The (q, state) or (b, state) marginal of a coupling.
EmpiricalJoint coupling_marginal(const Coupling& c, CouplingSide side);

}  // namespace dcal
