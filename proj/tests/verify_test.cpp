// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/verify.hpp"

#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dcal/error.hpp"

namespace dcal {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::vector<std::string> names(const std::vector<InvariantResult>& inv) {
  std::vector<std::string> out;
  out.reserve(inv.size());
  for (const InvariantResult& r : inv) out.push_back(r.name);
  return out;
}

TEST(QuickSuite, AllInvariantsPassOnHealthyBuild) {
  std::vector<InvariantResult> inv = run_quick_suite();
  EXPECT_THAT(names(inv),
              ElementsAre("metric_ground_truths", "sandwich_corrected",
                          "cdl_ordering", "weak_duality", "check_dp_ratio",
                          "dp_tail_mass", "batch_bound", "online_identity",
                          "determinism"));
  for (const InvariantResult& r : inv) {
    EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
  }
}

TEST(QuickSuite, InjectedDpViolationFailsOnlyTheRatioCheck) {
  VerifyOptions opts;
  opts.inject_dp_violation = true;
  std::vector<InvariantResult> inv = run_quick_suite(opts);
  int failing = 0;
  for (const InvariantResult& r : inv) {
    if (r.pass) continue;
    ++failing;
    EXPECT_EQ(r.name, "check_dp_ratio");
    EXPECT_THAT(r.detail, HasSubstr("flagged"));
  }
  EXPECT_EQ(failing, 1);
}

TEST(QuickSuite, DeterministicForAFixedSeed) {
  std::vector<InvariantResult> a = run_quick_suite();
  std::vector<InvariantResult> b = run_quick_suite();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].pass, b[i].pass);
    EXPECT_EQ(a[i].detail, b[i].detail) << a[i].name;
  }
}

TEST(RunCriterion, RejectsIdsOutsideRange) {
  EXPECT_THROW(run_criterion(0), InputError);
  EXPECT_THROW(run_criterion(11), InputError);
  EXPECT_THROW(run_criterion(-3), InputError);
}

TEST(RunCriterion, StampsIdTitleAndRuntime) {
  CriterionResult r = run_criterion(1);
  EXPECT_EQ(r.id, 1);
  EXPECT_GE(r.seconds, 0.0);
  EXPECT_FALSE(r.title.empty());
  EXPECT_FALSE(r.detail.empty());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(RunCriterion, FastCriteriaPassWithDefaultSeed) {
  for (int id : {4, 6, 9, 10}) {
    CriterionResult r = run_criterion(id);
    EXPECT_TRUE(r.pass) << "criterion " << id << ": " << r.detail;
  }
}

TEST(RunCriterion, InjectedDpViolationFailsThePrivacyCriterion) {
  VerifyOptions opts;
  opts.inject_dp_violation = true;
  CriterionResult r = run_criterion(4, opts);
  EXPECT_FALSE(r.pass);
  EXPECT_THAT(r.detail, HasSubstr("check_dp_ratio"));
  EXPECT_THAT(r.detail, HasSubstr("flagged"));
}

}  // namespace
}  // namespace dcal
