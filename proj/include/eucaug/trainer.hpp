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

// Training and evaluation loops. Every random choice draws from a named
// stream derived from the run seed, so a run is a pure function of its
// configuration.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "eucaug/augment.hpp"
#include "eucaug/ddpg.hpp"
#include "eucaug/features.hpp"
#include "eucaug/replay.hpp"

namespace eucaug {

enum class Stream : std::uint64_t { init = 1, env, explore, replay, augment, smoothing, eval };

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t salt = 0) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(stream), salt};
  return std::mt19937_64(seq);
}

struct CurveRecord {
  std::uint64_t step = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double wall_seconds = 0.0;

  bool operator==(const CurveRecord&) const = default;
};

struct TrainOptions {
  Representation repr = Representation::limb;
  FeatureOptions features;
  AugmentConfig augment;
  Hyperparams hyper;
  std::uint64_t total_steps = 200000;
  std::uint64_t seed = 0;
  int eval_every = 10000;
  int eval_episodes = 10;
  bool wall_clock = false;  // record elapsed time; off keeps curves byte-stable
};

struct TrainStats {
  std::uint64_t env_steps = 0;
  std::uint64_t updates = 0;
  std::uint64_t episodes = 0;
  std::uint64_t blowups = 0;
  std::uint64_t augmented = 0;
  std::uint64_t reward_checks = 0;
};

// One episode of the deterministic policy; a numerical blow-up ends it.
inline double run_episode(const Simulator& sim, const FeatureBuilder& builder, const DdpgAgent& agent,
                          std::mt19937_64& rng) {
  GeneralizedState gs = sim.reset(rng);
  double ret = 0.0;
  for (int t = 0; t < sim.task().episode_steps; ++t) {
    const Eigen::VectorXd a = agent.act(builder.features(gs), 0, ActMode::eval, rng);
    try {
      StepResult out = sim.step(gs, a);
      ret += out.reward;
      gs = std::move(out.state);
    } catch (const NumericalBlowup&) {
      break;
    }
  }
  return ret;
}

// Mean and population stddev of the episode returns. Reads the agent only.
inline CurveRecord evaluate(const Simulator& sim, const FeatureBuilder& builder, const DdpgAgent& agent, int episodes,
                            std::mt19937_64& rng) {
  std::vector<double> returns;
  for (int e = 0; e < episodes; ++e) returns.push_back(run_episode(sim, builder, agent, rng));
  CurveRecord rec;
  double sum = 0.0;
  for (double r : returns) sum += r;
  rec.mean_return = sum / episodes;
  double sq = 0.0;
  for (double r : returns) sq += (r - rec.mean_return) * (r - rec.mean_return);
  rec.std_return = std::sqrt(sq / episodes);
  return rec;
}

class Trainer {
 public:
  using EvalHook = std::function<void(const CurveRecord&)>;
  using CheckpointHook = std::function<void(const Trainer&)>;

  Trainer(const TaskSpec& task, TrainOptions opt)
      : sim_(task), builder_(sim_, opt.repr, opt.features), opt_(std::move(opt)),
        agent_(builder_.dimension(), sim_.action_size(), opt_.hyper, opt_.seed),
        buffer_(builder_.layout(), sim_.action_size(), opt_.hyper.replay_capacity, opt_.hyper.n_step,
                opt_.hyper.gamma),
        env_rng_(make_stream(opt_.seed, Stream::env)), explore_rng_(make_stream(opt_.seed, Stream::explore)),
        replay_rng_(make_stream(opt_.seed, Stream::replay)),
        augment_rng_(make_stream(opt_.seed, Stream::augment, opt_.augment.seed)),
        smoothing_rng_(make_stream(opt_.seed, Stream::smoothing)) {
    opt_.augment.check();
    check_compatible(opt_.augment, *builder_.layout());
    if (opt_.eval_every <= 0 || opt_.eval_episodes <= 0) throw ConfigError("eval_every and eval_episodes must be > 0");
  }

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  const Simulator& simulator() const { return sim_; }
  const FeatureBuilder& builder() const { return builder_; }
  const DdpgAgent& agent() const { return agent_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const TrainOptions& options() const { return opt_; }
  const TrainStats& stats() const { return stats_; }
  const std::vector<CurveRecord>& curve() const { return curve_; }
  std::uint64_t step() const { return step_; }

  // Runs until total_steps environment steps have been taken.
  const std::vector<CurveRecord>& run(const EvalHook& on_eval = {}, const CheckpointHook& on_checkpoint = {},
                                      std::uint64_t checkpoint_every = 0) {
    const auto start = std::chrono::steady_clock::now();
    while (step_ < opt_.total_steps) {
      advance();
      if (step_ % static_cast<std::uint64_t>(opt_.eval_every) == 0) {
        CurveRecord rec = evaluate_now();
        if (opt_.wall_clock) {
          rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        curve_.push_back(rec);
        if (on_eval) on_eval(rec);
      }
      if (checkpoint_every > 0 && step_ % checkpoint_every == 0 && on_checkpoint) on_checkpoint(*this);
    }
    return curve_;
  }

  // Evaluation at the current step on its own stream; learner state is
  // untouched.
  CurveRecord evaluate_now() const {
    std::mt19937_64 rng = make_stream(opt_.seed, Stream::eval, step_);
    CurveRecord rec = evaluate(sim_, builder_, agent_, opt_.eval_episodes, rng);
    rec.step = step_;
    return rec;
  }

  // Trainer state: step, episode progress, counters, rng streams, agent.
  // The replay buffer and the current episode's physical state are not
  // stored; see docs/checkpoint_format.md.
  void save_checkpoint(std::ostream& out) const {
    out.write("EUCAUGCK", 8);
    binary::write_u32(out, kCheckpointVersion);
    binary::write_u64(out, step_);
    binary::write_u64(out, stats_.updates);
    binary::write_u64(out, stats_.episodes);
    binary::write_rng(out, env_rng_);
    binary::write_rng(out, explore_rng_);
    binary::write_rng(out, replay_rng_);
    binary::write_rng(out, augment_rng_);
    binary::write_rng(out, smoothing_rng_);
    agent_.save(out);
  }

  void load_checkpoint(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::string(magic, 8) != "EUCAUGCK") throw ParseError("not an eucaug checkpoint");
    const std::uint32_t version = binary::read_u32(in);
    if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
    step_ = binary::read_u64(in);
    stats_.updates = binary::read_u64(in);
    stats_.episodes = binary::read_u64(in);
    binary::read_rng(in, env_rng_);
    binary::read_rng(in, explore_rng_);
    binary::read_rng(in, replay_rng_);
    binary::read_rng(in, augment_rng_);
    binary::read_rng(in, smoothing_rng_);
    agent_.load(in);
  }

  static constexpr std::uint32_t kCheckpointVersion = 1;

 private:
  void advance() {
    if (!episode_live_) {
      gs_ = sim_.reset(env_rng_);
      obs_ = builder_.features(gs_);
      episode_step_ = 0;
      episode_live_ = true;
    }
    const Eigen::VectorXd a = agent_.act(obs_, step_, ActMode::train, explore_rng_);
    bool terminal = false;
    double reward = 0.0;
    Eigen::VectorXd next_obs;
    try {
      StepResult out = sim_.step(gs_, a);
      reward = out.reward;
      gs_ = std::move(out.state);
      next_obs = builder_.features(gs_);
    } catch (const NumericalBlowup&) {
      terminal = true;
      ++stats_.blowups;
      next_obs = Eigen::VectorXd::Zero(builder_.dimension());
    }
    ++episode_step_;
    const bool truncated = !terminal && episode_step_ >= sim_.task().episode_steps;
    buffer_.add(obs_, a, reward, terminal, truncated, next_obs);
    if (terminal || truncated) {
      episode_live_ = false;
      ++stats_.episodes;
    } else {
      obs_ = std::move(next_obs);
    }
    if (step_ >= static_cast<std::uint64_t>(opt_.hyper.seed_frames)) learn();
    ++step_;
    ++stats_.env_steps;
  }

  void learn() {
    TransitionBatch batch = buffer_.sample(opt_.hyper.batch_size, replay_rng_);
    const Eigen::VectorXd rewards = batch.r_cum;
    const AugmentRecord rec = augment_batch(batch, opt_.augment, augment_rng_);
    stats_.augmented += rec.selected.size();
    if (batch.r_cum != rewards) throw std::logic_error("augmentation changed stored rewards");
    ++stats_.reward_checks;
    agent_.update(batch, step_, smoothing_rng_);
    ++stats_.updates;
  }

  Simulator sim_;
  FeatureBuilder builder_;
  TrainOptions opt_;
  DdpgAgent agent_;
  ReplayBuffer buffer_;
  std::mt19937_64 env_rng_;
  std::mt19937_64 explore_rng_;
  std::mt19937_64 replay_rng_;
  std::mt19937_64 augment_rng_;
  std::mt19937_64 smoothing_rng_;
  TrainStats stats_;
  std::vector<CurveRecord> curve_;
  std::uint64_t step_ = 0;
  GeneralizedState gs_;
  Eigen::VectorXd obs_;
  int episode_step_ = 0;
  bool episode_live_ = false;
};

// Convenience wrapper: train and return the learning curve.
inline std::vector<CurveRecord> train(const TaskSpec& task, const TrainOptions& opt) {
  Trainer trainer(task, opt);
  return trainer.run();
}

}  // namespace eucaug
