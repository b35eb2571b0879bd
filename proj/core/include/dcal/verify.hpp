// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcal {

// Options shared by the verification suites.
struct VerifyOptions {
  std::uint64_t seed = 0;
  // Negative control: swaps a deliberately corrupted noise fixture (a
  // budgeted gaussian whose sigma was overwritten after construction) into
  // the differential-privacy checks, which must then flag check_dp_ratio.
  bool inject_dp_violation = false;
};

// Outcome of one release criterion.  `detail` is a single line of measured
// numbers; for a failing criterion it carries the analysis of why the stated
// requirement does not hold.
struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs release criterion `id` (1..10); throws InputError outside that range.
// Every criterion is deterministic for a fixed seed.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

// All ten criteria, in order.
std::vector<CriterionResult> run_all_criteria(const VerifyOptions& opts = {});

// One named cross-module invariant check of the quick suite.
struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Fast invariant sweep (a few seconds): metric ground truths, the corrected
// smCal/DTC sandwich, cdl ordering, DTC weak duality, the privacy checks,
// one batch bound row, the online identity run, and rerun determinism.
std::vector<InvariantResult> run_quick_suite(const VerifyOptions& opts = {});

}  // namespace dcal
