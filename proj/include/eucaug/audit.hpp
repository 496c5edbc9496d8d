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


#pragma once

// Equivariance audit: executable checks that the simulator, the feature
// layouts and the augmentation engine agree on the yaw symmetry.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "eucaug/augment.hpp"
#include "eucaug/sampling.hpp"

namespace eucaug {

struct AuditOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  double threshold = 1e-6;
  int horizon = 3;  // control steps between s and s_next in the augmentation check
  FeatureOptions features;
  // Negative-control hook: edits the layout before it is used.
  std::function<void(FeatureLayout&)> layout_mutator;
};

struct AuditReport {
  std::string task;
  Representation repr = Representation::limb;
  int samples = 0;
  double step_equivariance = 0.0;
  double schema_soundness = 0.0;
  double augment_consistency = 0.0;
  double threshold = 1e-6;

  double worst() const { return std::max({step_equivariance, schema_soundness, augment_consistency}); }
  bool passed() const { return worst() < threshold; }
};

// max over samples of |step(R gs, a) - R step(gs, a)| and the reward gap.
inline double audit_step_equivariance(const Simulator& sim, int samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const GeneralizedState gs = sample_state(sim, rng);
    const Eigen::VectorXd a = sample_action(sim, rng);
    const double alpha = angle(rng);
    const StepResult rotated = sim.step(sim.rotate_internal(gs, alpha), a);
    const StepResult base = sim.step(gs, a);
    worst = std::max({worst, state_distance(sim, rotated.state, sim.rotate_internal(base.state, alpha)),
                      std::abs(rotated.reward - base.reward)});
  }
  return worst;
}

// max over samples of |build(R gs) - rotate_features(build(gs))| using only
// the layout tags.
inline double audit_schema_soundness(const Simulator& sim, const FeatureBuilder& builder, const FeatureLayout& layout,
                                     int samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const GeneralizedState gs = sample_state(sim, rng);
    const double alpha = angle(rng);
    Eigen::VectorXd expected = builder.features(gs);
    rotate_features(layout, expected, alpha);
    worst = std::max(worst, feature_distance(layout, builder.features(sim.rotate_internal(gs, alpha)), expected));
  }
  return worst;
}

// Records transitions from the simulator, augments them with the engine at
// rho = 1, and compares every augmented (s, s_next, r_cum) with a re-rollout
// from the rotated physical state.
inline double audit_augment_consistency(const Simulator& sim, const FeatureBuilder& builder, const LayoutPtr& layout,
                                        int samples, int horizon, double gamma, std::mt19937_64& rng) {
  struct Rollout {
    GeneralizedState start;
    std::vector<Eigen::VectorXd> actions;
  };
  auto rollout = [&](GeneralizedState gs, const std::vector<Eigen::VectorXd>& actions, double& r_cum) {
    r_cum = 0.0;
    double g = 1.0;
    for (const auto& a : actions) {
      StepResult out = sim.step(gs, a);
      r_cum += g * out.reward;
      g *= gamma;
      gs = std::move(out.state);
    }
    return gs;
  };
  std::vector<Rollout> rollouts;
  std::vector<Transition> ts;
  for (int i = 0; i < samples; ++i) {
    Rollout ro{sample_state(sim, rng), {}};
    for (int k = 0; k < horizon; ++k) ro.actions.push_back(sample_action(sim, rng));
    double r = 0.0;
    const GeneralizedState end = rollout(ro.start, ro.actions, r);
    ts.push_back(Transition{{builder.features(ro.start), layout}, ro.actions.front(), r,
                            {builder.features(end), layout}, std::pow(gamma, horizon)});
    rollouts.push_back(std::move(ro));
  }
  TransitionBatch batch = make_batch(ts);
  const AugmentKind kind =
      layout->representation() == Representation::limb ? AugmentKind::euclidean : AugmentKind::joint_euclidean;
  const AugmentRecord rec = augment_batch(batch, AugmentConfig{kind, 1.0}, rng);
  double worst = 0.0;
  for (std::size_t j = 0; j < rec.selected.size(); ++j) {
    const int col = rec.selected[j];
    const Rollout& ro = rollouts[static_cast<std::size_t>(col)];
    const GeneralizedState start = sim.rotate_internal(ro.start, rec.alpha[j]);
    double r = 0.0;
    const GeneralizedState end = rollout(start, ro.actions, r);
    worst = std::max({worst, feature_distance(*layout, batch.s.col(col), builder.features(start)),
                      feature_distance(*layout, batch.s_next.col(col), builder.features(end)),
                      std::abs(batch.r_cum[col] - r), (batch.a.col(col) - ro.actions.front()).cwiseAbs().maxCoeff()});
  }
  return worst;
}

inline AuditReport run_audit(const TaskSpec& task, Representation repr, const AuditOptions& opt = {}) {
  const Simulator sim(task);
  const FeatureBuilder builder(sim, repr, opt.features);
  FeatureLayout layout = *builder.layout();
  if (opt.layout_mutator) opt.layout_mutator(layout);
  const LayoutPtr used = std::make_shared<const FeatureLayout>(std::move(layout));

  AuditReport report;
  report.task = task.name;
  report.repr = repr;
  report.samples = opt.samples;
  report.threshold = opt.threshold;
  auto stream = [&](std::uint64_t id) {
    std::seed_seq seq{opt.seed, id};
    return std::mt19937_64(seq);
  };
  std::mt19937_64 rng = stream(1);
  report.step_equivariance = audit_step_equivariance(sim, opt.samples, rng);
  rng = stream(2);
  report.schema_soundness = audit_schema_soundness(sim, builder, *used, opt.samples, rng);
  rng = stream(3);
  report.augment_consistency = audit_augment_consistency(sim, builder, used, opt.samples, opt.horizon, 0.99, rng);
  return report;
}

}  // namespace eucaug
