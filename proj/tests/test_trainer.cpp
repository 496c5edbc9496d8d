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

#include <sstream>

#include "eucaug/trainer.hpp"

namespace eucaug {
namespace {

// A small, fast configuration: the schedule logic is identical to the
// default one.
TrainOptions small_options(std::uint64_t steps, std::uint64_t seed = 1) {
  TrainOptions opt;
  opt.hyper.hidden_size = 32;
  opt.hyper.batch_size = 16;
  opt.hyper.seed_frames = 300;
  opt.hyper.exploration_steps = 150;
  opt.total_steps = steps;
  opt.seed = seed;
  opt.eval_every = 500;
  opt.eval_episodes = 1;
  return opt;
}

TEST(Trainer, NoUpdatesBeforeSeedFrames) {
  TrainOptions opt = small_options(300);
  Trainer t(builtin_task("reacher_hard"), opt);
  const DdpgAgent initial = t.agent();
  t.run();
  EXPECT_EQ(t.stats().updates, 0u);
  EXPECT_EQ(t.stats().env_steps, 300u);
  EXPECT_TRUE(t.agent() == initial);
  EXPECT_TRUE(t.curve().empty());
}

TEST(Trainer, EvaluationSchedule) {
  TrainOptions opt = small_options(1250);
  Trainer t(builtin_task("reacher_hard"), opt);
  t.run();
  ASSERT_EQ(t.curve().size(), 2u);
  EXPECT_EQ(t.curve()[0].step, 500u);
  EXPECT_EQ(t.curve()[1].step, 1000u);
  EXPECT_EQ(t.stats().updates, 1250u - 300u);
  EXPECT_EQ(t.stats().reward_checks, t.stats().updates);
  EXPECT_EQ(t.stats().episodes, 1u);
  for (const auto& r : t.curve()) {
    EXPECT_GE(r.mean_return, 0.0);
    EXPECT_LE(r.mean_return, 1000.0);
    EXPECT_EQ(r.std_return, 0.0);  // one episode
    EXPECT_EQ(r.wall_seconds, 0.0);
  }
}

TEST(Trainer, SameSeedSameCurve) {
  for (AugmentKind kind : {AugmentKind::none, AugmentKind::euclidean}) {
    TrainOptions opt = small_options(1000, 7);
    opt.augment = AugmentConfig{kind, 0.5};
    const auto a = train(builtin_task("hopper3d_hop"), opt);
    const auto b = train(builtin_task("hopper3d_hop"), opt);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a, b);
  }
}

TEST(Trainer, DifferentSeedsDiffer) {
  Trainer a(builtin_task("cheetah2d_run"), small_options(600, 1));
  Trainer b(builtin_task("cheetah2d_run"), small_options(600, 2));
  a.run();
  b.run();
  EXPECT_FALSE(a.agent() == b.agent());
}

TEST(Trainer, ZeroRatioEuclideanMatchesNone) {
  TrainOptions none = small_options(800, 3);
  TrainOptions zero = none;
  zero.augment = AugmentConfig{AugmentKind::euclidean, 0.0};
  Trainer a(builtin_task("walker3d_run"), none);
  Trainer b(builtin_task("walker3d_run"), zero);
  a.run();
  b.run();
  EXPECT_TRUE(a.agent() == b.agent());
  EXPECT_EQ(a.curve(), b.curve());
  EXPECT_EQ(b.stats().augmented, 0u);
}

TEST(Trainer, AugmentationIsApplied) {
  TrainOptions opt = small_options(400, 4);
  opt.augment = AugmentConfig{AugmentKind::euclidean, 0.25};
  Trainer t(builtin_task("cheetah3d_run"), opt);
  t.run();
  EXPECT_EQ(t.stats().augmented, 100u * 4u);  // round(0.25 * 16) per update
  EXPECT_EQ(t.stats().reward_checks, 100u);
}

TEST(Trainer, EvaluationDoesNotMutateLearner) {
  Trainer t(builtin_task("reacher_hard"), small_options(400, 5));
  t.run();
  const DdpgAgent before = t.agent();
  const auto written = t.buffer().records_written();
  std::stringstream s1;
  t.save_checkpoint(s1);
  const CurveRecord r1 = t.evaluate_now();
  const CurveRecord r2 = t.evaluate_now();
  EXPECT_EQ(r1, r2);
  EXPECT_TRUE(t.agent() == before);
  EXPECT_EQ(t.buffer().records_written(), written);
  std::stringstream s2;
  t.save_checkpoint(s2);
  EXPECT_EQ(s1.str(), s2.str());
}

TEST(Trainer, IncompatibleAugmentationRejected) {
  TrainOptions opt = small_options(10);
  opt.repr = Representation::joint;
  opt.augment = AugmentConfig{AugmentKind::euclidean, 0.5};
  EXPECT_THROW(Trainer(builtin_task("hopper2d_hop"), opt), LayoutMismatch);
  opt.repr = Representation::limb;
  opt.augment = AugmentConfig{AugmentKind::joint_euclidean, 0.5};
  EXPECT_THROW(Trainer(builtin_task("hopper2d_hop"), opt), LayoutMismatch);
  opt.augment = {};
  opt.eval_every = 0;
  EXPECT_THROW(Trainer(builtin_task("hopper2d_hop"), opt), ConfigError);
}

TEST(Trainer, BlowupEndsEpisodeWithoutCrashing) {
  TaskSpec spec = builtin_task("cheetah2d_run");
  for (auto& j : spec.morphology.joints) {
    for (double& g : j.gear) g *= 1e7;
  }
  spec.physics.limits.stiffness = 0.0;
  spec.physics.limits.damping = 0.0;
  TrainOptions opt = small_options(200, 6);
  Trainer t(spec, opt);
  ASSERT_NO_THROW(t.run());
  EXPECT_GT(t.stats().blowups, 0u);
  EXPECT_EQ(t.stats().episodes, t.stats().blowups);
}

TEST(Trainer, CheckpointRoundTrip) {
  TrainOptions opt = small_options(700, 8);
  Trainer t(builtin_task("hopper2d_hop"), opt);
  t.run();
  std::stringstream blob;
  t.save_checkpoint(blob);
  Trainer restored(builtin_task("hopper2d_hop"), opt);
  restored.load_checkpoint(blob);
  EXPECT_TRUE(restored.agent() == t.agent());
  EXPECT_EQ(restored.step(), t.step());
  std::stringstream again;
  restored.save_checkpoint(again);
  EXPECT_EQ(again.str(), blob.str());

  std::stringstream bad("NOTACHECKPOINT");
  EXPECT_THROW(restored.load_checkpoint(bad), ParseError);
  std::string wrong_version = blob.str();
  wrong_version[8] = 9;
  std::stringstream wv(wrong_version);
  EXPECT_THROW(restored.load_checkpoint(wv), ParseError);
}

}  // namespace
}  // namespace eucaug
