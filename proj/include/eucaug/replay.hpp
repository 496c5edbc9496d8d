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

// FIFO replay of raw per-step records with n-step assembly at sampling time.
// An episode occupies its steps followed by one record holding the final
// observation, so n-step sums stop at episode boundaries.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "eucaug/augment.hpp"

namespace eucaug {

class ReplayBuffer {
 public:
  ReplayBuffer(LayoutPtr layout, int action_size, std::size_t capacity, int n_step, double gamma)
      : layout_(std::move(layout)), obs_dim_(layout_->dimension()), act_dim_(action_size), capacity_(capacity),
        n_step_(n_step), gamma_(gamma) {
    if (capacity_ < static_cast<std::size_t>(n_step_) + 2) throw std::invalid_argument("replay capacity too small");
    if (n_step_ < 1) throw std::invalid_argument("n_step must be at least 1");
    if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
  }

  // One environment step taken from `obs` with `action`. When the episode
  // ends here (`terminal`, or `truncated` by the time limit), `next_obs` is
  // stored as the episode's final observation.
  void add(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward, bool terminal, bool truncated,
           const Eigen::VectorXd& next_obs) {
    if (obs.size() != obs_dim_ || action.size() != act_dim_) throw std::invalid_argument("replay record size");
    push(obs, action, reward, terminal ? Kind::terminal_step : Kind::step);
    if (terminal || truncated) {
      if (next_obs.size() != obs_dim_) throw std::invalid_argument("replay final observation size");
      push(next_obs, Eigen::VectorXd::Zero(act_dim_), 0.0, Kind::final_obs);
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(written_ - oldest()); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t records_written() const { return written_; }
  const LayoutPtr& layout() const { return layout_; }
  int n_step() const { return n_step_; }
  double gamma() const { return gamma_; }

  // The transition starting at logical record `i`, if that record is a step
  // still held in the buffer and its n-step horizon has been observed.
  std::optional<Transition> transition(std::uint64_t i) const {
    if (i < oldest() || i >= written_ || kind(i) == Kind::final_obs) return std::nullopt;
    double r = 0.0;
    double g = 1.0;
    for (int k = 0; k < n_step_; ++k) {
      const std::uint64_t j = i + static_cast<std::uint64_t>(k);
      r += g * reward(j);
      g *= gamma_;
      if (j + 1 >= written_) return std::nullopt;
      if (kind(j) == Kind::terminal_step) return make(i, r, j + 1, 0.0);
      if (kind(j + 1) == Kind::final_obs) return make(i, r, j + 1, g);
    }
    return make(i, r, i + static_cast<std::uint64_t>(n_step_), g);
  }

  TransitionBatch sample(int batch, std::mt19937_64& rng) const {
    if (written_ == 0) throw std::logic_error("sampling an empty replay buffer");
    std::uniform_int_distribution<std::uint64_t> pick(oldest(), written_ - 1);
    TransitionBatch b;
    b.layout = layout_;
    b.s.resize(obs_dim_, batch);
    b.s_next.resize(obs_dim_, batch);
    b.a.resize(act_dim_, batch);
    b.r_cum.resize(batch);
    b.discount_n.resize(batch);
    for (int c = 0; c < batch; ++c) {
      std::optional<Transition> t;
      for (int attempt = 0; !t; ++attempt) {
        if (attempt > 10000) throw std::logic_error("replay buffer holds no complete transition");
        t = transition(pick(rng));
      }
      b.s.col(c) = t->s.values;
      b.s_next.col(c) = t->s_next.values;
      b.a.col(c) = t->a;
      b.r_cum[c] = t->r_cum;
      b.discount_n[c] = t->discount_n;
    }
    return b;
  }

 private:
  enum class Kind : std::uint8_t { step, terminal_step, final_obs };

  std::uint64_t oldest() const { return written_ > capacity_ ? written_ - capacity_ : 0; }
  std::size_t slot(std::uint64_t i) const { return static_cast<std::size_t>(i % capacity_); }
  Kind kind(std::uint64_t i) const { return kinds_[slot(i)]; }
  double reward(std::uint64_t i) const { return rewards_[slot(i)]; }

  Eigen::VectorXd observation(std::uint64_t i) const {
    return Eigen::Map<const Eigen::VectorXf>(obs_.data() + slot(i) * static_cast<std::size_t>(obs_dim_), obs_dim_)
        .cast<double>();
  }

  Transition make(std::uint64_t i, double r, std::uint64_t next, double discount) const {
    Eigen::VectorXd a =
        Eigen::Map<const Eigen::VectorXf>(act_.data() + slot(i) * static_cast<std::size_t>(act_dim_), act_dim_)
            .cast<double>();
    return Transition{{observation(i), layout_}, std::move(a), r, {observation(next), layout_}, discount};
  }

  void push(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward, Kind k) {
    const std::size_t s = slot(written_);
    if (s == kinds_.size()) {
      obs_.resize(obs_.size() + static_cast<std::size_t>(obs_dim_));
      act_.resize(act_.size() + static_cast<std::size_t>(act_dim_));
      rewards_.push_back(0.0f);
      kinds_.push_back(k);
    }
    Eigen::Map<Eigen::VectorXf>(obs_.data() + s * static_cast<std::size_t>(obs_dim_), obs_dim_) = obs.cast<float>();
    Eigen::Map<Eigen::VectorXf>(act_.data() + s * static_cast<std::size_t>(act_dim_), act_dim_) =
        action.cast<float>();
    rewards_[s] = static_cast<float>(reward);
    kinds_[s] = k;
    ++written_;
  }

  LayoutPtr layout_;
  int obs_dim_;
  int act_dim_;
  std::size_t capacity_;
  int n_step_;
  double gamma_;
  std::vector<float> obs_;
  std::vector<float> act_;
  std::vector<float> rewards_;
  std::vector<Kind> kinds_;
  std::uint64_t written_ = 0;
};

}  // namespace eucaug
