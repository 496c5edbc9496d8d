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

#include <random>

#include "eucaug/replay.hpp"

namespace eucaug {
namespace {

LayoutPtr scalar_layout() {
  FeatureLayout l(Representation::limb);
  l.append("x", FeatureTag::invariant, 1);
  return std::make_shared<const FeatureLayout>(l);
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

constexpr double kGamma = 0.99;
const double kRewards[5] = {0.5, 0.25, 0.125, 1.0, 0.0};

// One five-step episode whose observations are 0..4 and final observation 5.
ReplayBuffer five_step_episode(bool terminal) {
  ReplayBuffer buf(scalar_layout(), 1, 100, 3, kGamma);
  for (int t = 0; t < 5; ++t) {
    const bool last = t == 4;
    buf.add(scalar(t), scalar(0.1 * t), kRewards[t], last && terminal, last && !terminal, scalar(t + 1));
  }
  return buf;
}

TEST(NStep, HandBuiltTruncatedEpisode) {
  const ReplayBuffer buf = five_step_episode(false);
  const double g = kGamma;
  const double r[5] = {kRewards[0], kRewards[1], kRewards[2], kRewards[3], kRewards[4]};
  struct Expect {
    double r_cum;
    double discount;
    double next;
  } expect[5] = {
      {r[0] + g * r[1] + (g * g) * r[2], g * g * g, 3},
      {r[1] + g * r[2] + (g * g) * r[3], g * g * g, 4},
      {r[2] + g * r[3] + (g * g) * r[4], g * g * g, 5},
      {r[3] + g * r[4], g * g, 5},
      {r[4], g, 5},
  };
  for (int i = 0; i < 5; ++i) {
    const auto t = buf.transition(static_cast<std::uint64_t>(i));
    ASSERT_TRUE(t.has_value()) << i;
    EXPECT_EQ(t->r_cum, expect[i].r_cum) << i;
    EXPECT_EQ(t->discount_n, expect[i].discount) << i;
    EXPECT_EQ(t->s.values[0], i);
    EXPECT_EQ(t->s_next.values[0], expect[i].next) << i;
    EXPECT_EQ(t->a[0], static_cast<double>(static_cast<float>(0.1 * i)));
  }
  // Record 5 is the final observation, not a transition start.
  EXPECT_FALSE(buf.transition(5).has_value());
  EXPECT_EQ(buf.size(), 6u);
}

TEST(NStep, HandBuiltTerminalEpisode) {
  const ReplayBuffer buf = five_step_episode(true);
  const double g = kGamma;
  const double r[5] = {kRewards[0], kRewards[1], kRewards[2], kRewards[3], kRewards[4]};
  EXPECT_EQ(buf.transition(0)->discount_n, g * g * g);
  EXPECT_EQ(buf.transition(1)->discount_n, g * g * g);
  EXPECT_EQ(buf.transition(2)->r_cum, r[2] + g * r[3] + (g * g) * r[4]);
  EXPECT_EQ(buf.transition(2)->discount_n, 0.0);
  EXPECT_EQ(buf.transition(3)->r_cum, r[3] + g * r[4]);
  EXPECT_EQ(buf.transition(3)->discount_n, 0.0);
  EXPECT_EQ(buf.transition(4)->discount_n, 0.0);
}

TEST(NStep, SumsNeverCrossEpisodes) {
  ReplayBuffer buf(scalar_layout(), 1, 100, 3, kGamma);
  for (int t = 0; t < 2; ++t) buf.add(scalar(t), scalar(0), 1.0, false, t == 1, scalar(t + 1));
  for (int t = 0; t < 4; ++t) buf.add(scalar(10 + t), scalar(0), 100.0, false, false, scalar(0));
  const auto first = buf.transition(0);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->r_cum, 1.0 + kGamma * 1.0);
  EXPECT_EQ(first->s_next.values[0], 2.0);
  EXPECT_EQ(buf.transition(1)->r_cum, 1.0);
}

TEST(NStep, InProgressEpisodeIsNotSampledEarly) {
  ReplayBuffer buf(scalar_layout(), 1, 100, 3, kGamma);
  for (int t = 0; t < 3; ++t) buf.add(scalar(t), scalar(0), 0.5, false, false, scalar(0));
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(buf.transition(static_cast<std::uint64_t>(i))) << i;
  buf.add(scalar(3), scalar(0), 0.5, false, false, scalar(0));
  EXPECT_TRUE(buf.transition(0));
  EXPECT_EQ(buf.transition(0)->s_next.values[0], 3.0);
  EXPECT_FALSE(buf.transition(1));
}

TEST(NStep, OneStepConfig) {
  ReplayBuffer buf(scalar_layout(), 1, 100, 1, kGamma);
  for (int t = 0; t < 3; ++t) buf.add(scalar(t), scalar(0), kRewards[t], false, t == 2, scalar(t + 1));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(buf.transition(static_cast<std::uint64_t>(i))->r_cum, kRewards[i]);
    EXPECT_EQ(buf.transition(static_cast<std::uint64_t>(i))->discount_n, kGamma);
    EXPECT_EQ(buf.transition(static_cast<std::uint64_t>(i))->s_next.values[0], i + 1);
  }
}

TEST(Replay, FifoEviction) {
  ReplayBuffer buf(scalar_layout(), 1, 10, 3, kGamma);
  for (int t = 0; t < 25; ++t) buf.add(scalar(t), scalar(0), 0.0, false, false, scalar(0));
  EXPECT_EQ(buf.size(), 10u);
  EXPECT_EQ(buf.records_written(), 25u);
  for (std::uint64_t i = 0; i < 15; ++i) EXPECT_FALSE(buf.transition(i)) << i;
  for (std::uint64_t i = 15; i < 22; ++i) {
    ASSERT_TRUE(buf.transition(i)) << i;
    EXPECT_EQ(buf.transition(i)->s.values[0], static_cast<double>(i));
    EXPECT_EQ(buf.transition(i)->s_next.values[0], static_cast<double>(i + 3));
  }
  std::mt19937_64 rng(1);
  const TransitionBatch b = buf.sample(64, rng);
  EXPECT_GE(b.s.minCoeff(), 15.0);
  EXPECT_LE(b.s.maxCoeff(), 21.0);
  EXPECT_EQ(b.s_next - b.s, Eigen::MatrixXd::Constant(1, 64, 3.0));
}

TEST(Replay, SampleIsSeedDeterministicAndCoversBuffer) {
  ReplayBuffer buf(scalar_layout(), 1, 1000, 3, kGamma);
  for (int t = 0; t < 200; ++t) buf.add(scalar(t), scalar(0), 0.25, false, t % 50 == 49, scalar(-1));
  std::mt19937_64 r1(2);
  std::mt19937_64 r2(2);
  const TransitionBatch a = buf.sample(256, r1);
  const TransitionBatch b = buf.sample(256, r2);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.layout, buf.layout());
  std::vector<int> seen(200, 0);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 40; ++k) {
    const TransitionBatch s = buf.sample(256, rng);
    for (int i = 0; i < s.size(); ++i) {
      // Final observations (-1) are never a transition start.
      ASSERT_GE(s.s(0, i), 0.0);
      ++seen[static_cast<std::size_t>(s.s(0, i))];
    }
  }
  for (int t = 0; t < 200; ++t) EXPECT_GT(seen[static_cast<std::size_t>(t)], 0) << t;
}

TEST(Replay, RejectsBadInput) {
  EXPECT_THROW(ReplayBuffer(scalar_layout(), 1, 3, 3, kGamma), std::invalid_argument);
  EXPECT_THROW(ReplayBuffer(scalar_layout(), 1, 100, 0, kGamma), std::invalid_argument);
  ReplayBuffer buf(scalar_layout(), 1, 100, 3, kGamma);
  std::mt19937_64 rng(4);
  EXPECT_THROW(buf.sample(4, rng), std::logic_error);
  EXPECT_THROW(buf.add(Eigen::VectorXd::Zero(2), scalar(0), 0.0, false, false, scalar(0)), std::invalid_argument);
}

}  // namespace
}  // namespace eucaug
