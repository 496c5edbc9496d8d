// Copyright 2026 The eucaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "eucaug/audit.hpp"
#include "eucaug/harness.hpp"

namespace eucaug {
namespace {

AuditOptions quick(int samples = 200) {
  AuditOptions opt;
  opt.samples = samples;
  opt.seed = 11;
  return opt;
}

TEST(Audit, LimbAndJointPassWellBelowThreshold) {
  for (const char* name : {"reacher_hard", "hopper2d_hop", "cheetah3d_run"}) {
    for (Representation r : {Representation::limb, Representation::joint}) {
      const AuditReport rep = run_audit(builtin_task(name), r, quick());
      EXPECT_TRUE(rep.passed()) << name << " " << to_string(r);
      EXPECT_LT(rep.step_equivariance, 1e-8) << name;
      EXPECT_LT(rep.schema_soundness, 1e-8) << name;
      EXPECT_LT(rep.augment_consistency, 1e-8) << name;
      EXPECT_EQ(rep.samples, 200);
    }
  }
}

TEST(Audit, MisTaggedLimbLayoutFails) {
  AuditOptions opt = quick();
  opt.layout_mutator = retag_mutator("omega1", FeatureTag::invariant);
  const AuditReport rep = run_audit(builtin_task("hopper3d_hop"), Representation::limb, opt);
  EXPECT_FALSE(rep.passed());
  EXPECT_GT(rep.schema_soundness, 1e-3);
  EXPECT_GT(rep.augment_consistency, 1e-3);
  // The dynamics check does not read the layout.
  EXPECT_LT(rep.step_equivariance, 1e-8);
}

TEST(Audit, MisTaggedJointLayoutFails) {
  AuditOptions opt = quick();
  opt.layout_mutator = retag_mutator("root.yaw", FeatureTag::invariant);
  EXPECT_FALSE(run_audit(builtin_task("walker3d_run"), Representation::joint, opt).passed());

  // A hinge angle marked as a heading angle is shifted by the rotation.
  AuditOptions hinge = quick();
  const Simulator sim(builtin_task("hopper3d_hop"));
  const FeatureBuilder builder(sim, Representation::joint, {});
  std::string hinge_name;
  for (const auto& s : builder.layout()->slices()) {
    if (s.tag == FeatureTag::invariant && s.length == 1) {
      hinge_name = s.name;
      break;
    }
  }
  ASSERT_FALSE(hinge_name.empty());
  hinge.layout_mutator = retag_mutator(hinge_name, FeatureTag::yaw_angle);
  EXPECT_FALSE(run_audit(builtin_task("hopper3d_hop"), Representation::joint, hinge).passed());
}

TEST(Audit, ThresholdDecidesVerdict) {
  AuditOptions opt = quick(50);
  opt.threshold = 0.0;  // residuals are never below zero
  EXPECT_FALSE(run_audit(builtin_task("hopper2d_hop"), Representation::limb, opt).passed());
}

TEST(Audit, DeterministicForSeed) {
  const AuditReport a = run_audit(builtin_task("walker2d_run"), Representation::limb, quick(50));
  const AuditReport b = run_audit(builtin_task("walker2d_run"), Representation::limb, quick(50));
  EXPECT_EQ(a.step_equivariance, b.step_equivariance);
  EXPECT_EQ(a.schema_soundness, b.schema_soundness);
  EXPECT_EQ(a.augment_consistency, b.augment_consistency);
}

TEST(Audit, RetagRejectsUnknownOrUnfitSlices) {
  FeatureLayout layout = *FeatureBuilder(Simulator(builtin_task("reacher_hard")), Representation::limb, {}).layout();
  EXPECT_THROW(retag_mutator("no_such_slice", FeatureTag::invariant)(layout), ConfigError);
  EXPECT_THROW(retag_mutator("omega1", FeatureTag::yaw_angle)(layout), ConfigError);
}

TEST(Audit, CommandPrintsOneRowPerCaseAndExitCode) {
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_audit({"reacher_hard"}, {Representation::limb, Representation::joint}, quick(20), out, err), kExitOk);
  const std::string text = out.str();
  EXPECT_NE(text.find("reacher_hard    limb"), std::string::npos);
  EXPECT_NE(text.find("reacher_hard    joint"), std::string::npos);
  EXPECT_NE(text.find("audit PASS"), std::string::npos);

  AuditOptions bad = quick(20);
  bad.layout_mutator = retag_mutator("task", FeatureTag::invariant);
  std::ostringstream out2;
  EXPECT_EQ(cmd_audit({"reacher_hard"}, {Representation::limb}, bad, out2, err), kExitAuditFailed);
  EXPECT_NE(out2.str().find("FAIL"), std::string::npos);

  EXPECT_EQ(cmd_audit({"unknown_task"}, {Representation::limb}, quick(20), out, err), kExitConfig);
}

}  // namespace
}  // namespace eucaug
