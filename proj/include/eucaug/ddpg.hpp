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

// DDPG with a target critic, n-step targets, target-policy smoothing and a
// linearly decaying exploration schedule.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eucaug/augment.hpp"
#include "eucaug/errors.hpp"
#include "eucaug/nn.hpp"

namespace eucaug {

struct Hyperparams {
  double lr = 1e-4;
  int batch_size = 256;
  int actor_update_every = 2;
  int target_update_every = 2;
  double tau = 0.01;
  double smoothing_clip = 0.3;
  bool target_smoothing = true;
  int seed_frames = 4000;
  int exploration_steps = 2000;
  double noise_init = 1.0;
  double noise_final = 0.1;
  double noise_duration = 1e6;
  int action_repeat = 1;
  int n_step = 3;
  double gamma = 0.99;
  int hidden_size = 256;
  int hidden_layers = 2;
  std::size_t replay_capacity = 1000000;
  double actor_last_layer_scale = 0.1;

  // n-step 1 without smoothing: the one-step TD target.
  static Hyperparams one_step() {
    Hyperparams h;
    h.n_step = 1;
    h.target_smoothing = false;
    return h;
  }

  void check() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(lr, "lr");
    positive(batch_size, "batch_size");
    positive(actor_update_every, "actor_update_every");
    positive(target_update_every, "target_update_every");
    positive(smoothing_clip, "smoothing_clip");
    positive(noise_duration, "noise_duration");
    positive(n_step, "n_step");
    positive(hidden_size, "hidden_size");
    positive(hidden_layers, "hidden_layers");
    positive(static_cast<double>(replay_capacity), "replay_capacity");
    positive(actor_last_layer_scale, "actor_last_layer_scale");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
    if (seed_frames < 0 || exploration_steps < 0) throw ConfigError("seed_frames and exploration_steps must be >= 0");
    if (noise_init < 0.0 || noise_final < 0.0) throw ConfigError("noise stddevs must be >= 0");
    if (action_repeat != 1) throw ConfigError("only action_repeat = 1 is supported");
  }

  bool operator==(const Hyperparams&) const = default;
};

inline nlohmann::json to_json(const Hyperparams& h) {
  return {{"lr", h.lr},
          {"batch_size", h.batch_size},
          {"actor_update_every", h.actor_update_every},
          {"target_update_every", h.target_update_every},
          {"tau", h.tau},
          {"smoothing_clip", h.smoothing_clip},
          {"target_smoothing", h.target_smoothing},
          {"seed_frames", h.seed_frames},
          {"exploration_steps", h.exploration_steps},
          {"noise_init", h.noise_init},
          {"noise_final", h.noise_final},
          {"noise_duration", h.noise_duration},
          {"action_repeat", h.action_repeat},
          {"n_step", h.n_step},
          {"gamma", h.gamma},
          {"hidden_size", h.hidden_size},
          {"hidden_layers", h.hidden_layers},
          {"replay_capacity", h.replay_capacity},
          {"actor_last_layer_scale", h.actor_last_layer_scale}};
}

// Overrides fields of `base` present in `j`; unknown keys are rejected.
inline Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {}) {
  if (!j.is_object()) throw ConfigError("hyperparameters must be a JSON object");
  Hyperparams h = base;
  const nlohmann::json known = to_json(h);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown hyperparameter '" + key + "'");
    const auto& ref = known.at(key);
    const bool ok = ref.is_boolean()          ? value.is_boolean()
                    : ref.is_number_integer() ? value.is_number_integer() && value.get<double>() >= 0
                                              : value.is_number();
    if (!ok) throw ConfigError("hyperparameter '" + key + "' has the wrong type");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("lr", h.lr);
  get("batch_size", h.batch_size);
  get("actor_update_every", h.actor_update_every);
  get("target_update_every", h.target_update_every);
  get("tau", h.tau);
  get("smoothing_clip", h.smoothing_clip);
  get("target_smoothing", h.target_smoothing);
  get("seed_frames", h.seed_frames);
  get("exploration_steps", h.exploration_steps);
  get("noise_init", h.noise_init);
  get("noise_final", h.noise_final);
  get("noise_duration", h.noise_duration);
  get("action_repeat", h.action_repeat);
  get("n_step", h.n_step);
  get("gamma", h.gamma);
  get("hidden_size", h.hidden_size);
  get("hidden_layers", h.hidden_layers);
  get("replay_capacity", h.replay_capacity);
  get("actor_last_layer_scale", h.actor_last_layer_scale);
  h.check();
  return h;
}

// Stddev sigma(step) of the exploration and smoothing noise.
inline double noise_stddev(const Hyperparams& h, std::uint64_t step) {
  const double mix = std::min(static_cast<double>(step) / h.noise_duration, 1.0);
  return h.noise_init + (h.noise_final - h.noise_init) * mix;
}

template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
MatrixT<T> stack_rows(const MatrixT<T>& top, const MatrixT<T>& bottom) {
  MatrixT<T> out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

// Mean squared TD error of Q(s, a) against fixed targets y (1 x B). Adds the
// critic gradient to `grad` when given.
template <typename T>
T critic_loss(const Mlp<T>& critic, const MatrixT<T>& s, const MatrixT<T>& a, const MatrixT<T>& y,
              VectorT<T>* grad = nullptr) {
  typename Mlp<T>::Cache cache;
  const MatrixT<T> q = critic.forward(stack_rows(s, a), grad ? &cache : nullptr);
  const MatrixT<T> err = q - y;
  const T n = static_cast<T>(err.cols());
  if (grad) critic.backward(cache, (T(2) / n) * err, grad, false);
  return err.squaredNorm() / n;
}

// -mean Q(s, pi(s)) with the critic held fixed. Adds the actor gradient to
// `grad` when given. Any critic with the Mlp forward/backward interface works.
template <typename T, typename Critic>
T actor_loss(const Mlp<T>& actor, const Critic& critic, const MatrixT<T>& s, VectorT<T>* grad = nullptr) {
  typename Mlp<T>::Cache actor_cache;
  typename Critic::Cache critic_cache;
  const MatrixT<T> a = actor.forward(s, grad ? &actor_cache : nullptr);
  const MatrixT<T> q = critic.forward(stack_rows(s, a), grad ? &critic_cache : nullptr);
  const T n = static_cast<T>(q.cols());
  if (grad) {
    const MatrixT<T> dq = MatrixT<T>::Constant(1, q.cols(), -T(1) / n);
    const MatrixT<T> dx = critic.backward(critic_cache, dq, nullptr);
    actor.backward(actor_cache, dx.bottomRows(a.rows()), grad, false);
  }
  return -q.sum() / n;
}

enum class ActMode { train, eval };

struct UpdateInfo {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
  bool target_updated = false;
};

class DdpgAgent {
 public:
  using Net = Mlp<float>;

  DdpgAgent(int obs_dim, int act_dim, Hyperparams hp, std::uint64_t seed) : hp_(std::move(hp)) {
    hp_.check();
    std::vector<int> actor_sizes{obs_dim};
    std::vector<int> critic_sizes{obs_dim + act_dim};
    for (int l = 0; l < hp_.hidden_layers; ++l) {
      actor_sizes.push_back(hp_.hidden_size);
      critic_sizes.push_back(hp_.hidden_size);
    }
    actor_sizes.push_back(act_dim);
    critic_sizes.push_back(1);
    std::seed_seq seq{seed, std::uint64_t{0x1217}};
    std::mt19937_64 rng(seq);
    actor_ = Net(actor_sizes, OutputActivation::tanh);
    actor_.initialize(rng, hp_.actor_last_layer_scale);
    critic_ = Net(critic_sizes, OutputActivation::identity);
    critic_.initialize(rng);
    critic_target_ = critic_;
    AdamConfig<float> adam;
    adam.lr = static_cast<float>(hp_.lr);
    actor_opt_ = Adam<float>(actor_.parameter_count(), adam);
    critic_opt_ = Adam<float>(critic_.parameter_count(), adam);
  }

  const Hyperparams& hyperparams() const { return hp_; }
  int observation_size() const { return actor_.input_size(); }
  int action_size() const { return actor_.output_size(); }
  const Net& actor() const { return actor_; }
  const Net& critic() const { return critic_; }
  const Net& critic_target() const { return critic_target_; }
  Net& actor() { return actor_; }
  Net& critic() { return critic_; }
  Net& critic_target() { return critic_target_; }
  std::uint64_t updates() const { return updates_; }

  Eigen::VectorXd policy(const Eigen::VectorXd& obs) const {
    const MatrixT<float> a = actor_.forward(obs.cast<float>());
    return a.cast<double>().col(0).cwiseMax(-1.0).cwiseMin(1.0);
  }

  // Eval: the deterministic policy. Train: uniform during the first
  // exploration_steps, then the policy plus N(0, sigma(step)^2), clipped.
  Eigen::VectorXd act(const Eigen::VectorXd& obs, std::uint64_t step, ActMode mode, std::mt19937_64& rng) const {
    if (mode == ActMode::eval) return policy(obs);
    const int m = action_size();
    Eigen::VectorXd a(m);
    if (step < static_cast<std::uint64_t>(hp_.exploration_steps)) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < m; ++i) a[i] = u(rng);
      return a;
    }
    a = policy(obs);
    std::normal_distribution<double> noise(0.0, noise_stddev(hp_, step));
    for (int i = 0; i < m; ++i) a[i] = std::clamp(a[i] + noise(rng), -1.0, 1.0);
    return a;
  }

  // TD targets y = r_cum + discount_n * Qbar(s', clip(pi(s') + eps)).
  MatrixT<float> td_targets(const TransitionBatch& b, std::uint64_t step, std::mt19937_64& rng) const {
    const MatrixT<float> s_next = b.s_next.cast<float>();
    MatrixT<float> a_next = actor_.forward(s_next);
    if (hp_.target_smoothing) {
      std::normal_distribution<double> noise(0.0, noise_stddev(hp_, step));
      const double c = hp_.smoothing_clip;
      for (Eigen::Index i = 0; i < a_next.size(); ++i) {
        const double eps = std::clamp(noise(rng), -c, c);
        a_next.data()[i] = static_cast<float>(std::clamp(a_next.data()[i] + eps, -1.0, 1.0));
      }
    }
    const MatrixT<float> q_next = critic_target_.forward(stack_rows(s_next, a_next));
    MatrixT<float> y(1, b.size());
    for (int i = 0; i < b.size(); ++i) {
      y(0, i) = static_cast<float>(b.r_cum[i] + b.discount_n[i] * static_cast<double>(q_next(0, i)));
    }
    return y;
  }

  double critic_update(const TransitionBatch& b, std::uint64_t step, std::mt19937_64& rng) {
    const MatrixT<float> y = td_targets(b, step, rng);
    VectorT<float> grad = VectorT<float>::Zero(critic_.parameter_count());
    const float loss = critic_loss<float>(critic_, b.s.cast<float>(), b.a.cast<float>(), y, &grad);
    critic_opt_.step(critic_.params(), grad);
    return loss;
  }

  double actor_update(const TransitionBatch& b) {
    VectorT<float> grad = VectorT<float>::Zero(actor_.parameter_count());
    const float loss = actor_loss<float>(actor_, critic_, b.s.cast<float>(), &grad);
    actor_opt_.step(actor_.params(), grad);
    return loss;
  }

  void target_update() { soft_update(critic_target_, critic_, hp_.tau); }

  // One critic step; actor and target steps on their schedules.
  UpdateInfo update(const TransitionBatch& b, std::uint64_t step, std::mt19937_64& rng) {
    UpdateInfo info;
    info.critic_loss = critic_update(b, step, rng);
    ++updates_;
    if (updates_ % static_cast<std::uint64_t>(hp_.actor_update_every) == 0) {
      info.actor_loss = actor_update(b);
      info.actor_updated = true;
    }
    if (updates_ % static_cast<std::uint64_t>(hp_.target_update_every) == 0) {
      target_update();
      info.target_updated = true;
    }
    return info;
  }

  void save(std::ostream& out) const;
  void load(std::istream& in);

  bool operator==(const DdpgAgent& o) const {
    return hp_ == o.hp_ && actor_ == o.actor_ && critic_ == o.critic_ && critic_target_ == o.critic_target_ &&
           actor_opt_ == o.actor_opt_ && critic_opt_ == o.critic_opt_ && updates_ == o.updates_;
  }

 private:
  Hyperparams hp_;
  Net actor_;
  Net critic_;
  Net critic_target_;
  Adam<float> actor_opt_;
  Adam<float> critic_opt_;
  std::uint64_t updates_ = 0;
};

// Little-endian binary records; layout documented in docs/checkpoint_format.md.
namespace binary {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  if (n > (1u << 30)) throw ParseError("checkpoint string too long");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw ParseError("checkpoint truncated");
  return s;
}

inline void write_floats(std::ostream& out, const VectorT<float>& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, v.data() + i, 4);
    write_u32(out, bits);
  }
}

inline void read_floats(std::istream& in, VectorT<float>& v) {
  const std::uint64_t n = read_u64(in);
  if (n != static_cast<std::uint64_t>(v.size())) throw ParseError("checkpoint array size mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const std::uint32_t bits = read_u32(in);
    std::memcpy(v.data() + i, &bits, 4);
  }
}

template <typename Rng>
void write_rng(std::ostream& out, const Rng& rng) {
  std::ostringstream s;
  s << rng;
  write_string(out, s.str());
}

template <typename Rng>
void read_rng(std::istream& in, Rng& rng) {
  std::istringstream s(read_string(in));
  s >> rng;
  if (!s) throw ParseError("checkpoint rng state unreadable");
}

}  // namespace binary

inline void write_network(std::ostream& out, const Mlp<float>& net) {
  binary::write_u32(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (int n : net.sizes()) binary::write_u32(out, static_cast<std::uint32_t>(n));
  binary::write_u32(out, net.output_activation() == OutputActivation::tanh ? 1u : 0u);
  binary::write_floats(out, net.params());
}

inline void read_network(std::istream& in, Mlp<float>& net) {
  const std::uint32_t count = binary::read_u32(in);
  if (count != net.sizes().size()) throw ParseError("checkpoint network depth mismatch");
  for (int n : net.sizes()) {
    if (binary::read_u32(in) != static_cast<std::uint32_t>(n)) throw ParseError("checkpoint layer size mismatch");
  }
  const std::uint32_t act = binary::read_u32(in);
  if (act != (net.output_activation() == OutputActivation::tanh ? 1u : 0u)) {
    throw ParseError("checkpoint output activation mismatch");
  }
  binary::read_floats(in, net.params());
}

inline void write_adam(std::ostream& out, const Adam<float>& opt) {
  binary::write_u64(out, opt.steps());
  binary::write_floats(out, opt.first_moment());
  binary::write_floats(out, opt.second_moment());
}

inline void read_adam(std::istream& in, Adam<float>& opt) {
  opt.set_steps(binary::read_u64(in));
  binary::read_floats(in, opt.first_moment());
  binary::read_floats(in, opt.second_moment());
}

inline void DdpgAgent::save(std::ostream& out) const {
  binary::write_string(out, to_json(hp_).dump());
  binary::write_u64(out, updates_);
  write_network(out, actor_);
  write_network(out, critic_);
  write_network(out, critic_target_);
  write_adam(out, actor_opt_);
  write_adam(out, critic_opt_);
}

// Loads into an agent constructed with the same sizes and hyperparameters.
inline void DdpgAgent::load(std::istream& in) {
  Hyperparams stored;
  try {
    stored = hyperparams_from_json(nlohmann::json::parse(binary::read_string(in)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint hyperparameters: ") + e.what());
  }
  if (!(stored == hp_)) throw ParseError("checkpoint hyperparameters differ from the agent's");
  updates_ = binary::read_u64(in);
  read_network(in, actor_);
  read_network(in, critic_);
  read_network(in, critic_target_);
  read_adam(in, actor_opt_);
  read_adam(in, critic_opt_);
}

}  // namespace eucaug
