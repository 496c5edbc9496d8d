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

// Multilayer perceptrons with hand-written reverse mode, stored as one flat
// parameter vector so optimizers, target averaging and checkpoints are plain
// vector operations.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace eucaug {

enum class OutputActivation { identity, tanh };

template <typename T>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  // Post-activation outputs of every layer; acts[0] is the input.
  struct Cache {
    std::vector<Matrix> acts;
  };

  Mlp() = default;

  Mlp(std::vector<int> sizes, OutputActivation out) : sizes_(std::move(sizes)), out_(out) {
    if (sizes_.size() < 2) throw std::invalid_argument("an Mlp needs at least an input and an output size");
    Eigen::Index n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("layer sizes must be positive");
      weight_offset_.push_back(n);
      n += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
      bias_offset_.push_back(n);
      n += sizes_[l + 1];
    }
    params_ = Vector::Zero(n);
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases; the last
  // layer is multiplied by `last_scale`.
  template <typename Rng>
  void initialize(Rng& rng, double last_scale = 1.0) {
    for (int l = 0; l < layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[static_cast<std::size_t>(l)]));
      const double scale = l + 1 == layers() ? last_scale : 1.0;
      std::uniform_real_distribution<double> u(-bound, bound);
      auto w = weight(l);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(scale * u(rng));
      auto b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = static_cast<T>(scale * u(rng));
    }
  }

  int layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_; }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  MatrixMap weight(int l) { return weight_in(params_, l); }
  ConstMatrixMap weight(int l) const { return weight_in(params_, l); }
  VectorMap bias(int l) { return bias_in(params_, l); }
  ConstVectorMap bias(int l) const { return bias_in(params_, l); }

  // Views of layer l inside any vector with this network's parameter layout
  // (gradients, optimizer moments).
  MatrixMap weight_in(Vector& flat, int l) const {
    return {flat.data() + weight_offset_[static_cast<std::size_t>(l)], rows(l), cols(l)};
  }
  ConstMatrixMap weight_in(const Vector& flat, int l) const {
    return {flat.data() + weight_offset_[static_cast<std::size_t>(l)], rows(l), cols(l)};
  }
  VectorMap bias_in(Vector& flat, int l) const {
    return {flat.data() + bias_offset_[static_cast<std::size_t>(l)], rows(l)};
  }
  ConstVectorMap bias_in(const Vector& flat, int l) const {
    return {flat.data() + bias_offset_[static_cast<std::size_t>(l)], rows(l)};
  }

  // x: input_size x B. Returns output_size x B. Fills `cache` when given.
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    if (x.rows() != input_size()) throw std::invalid_argument("Mlp input has the wrong number of rows");
    if (cache) {
      cache->acts.resize(static_cast<std::size_t>(layers()) + 1);
      cache->acts[0] = x;
    }
    Matrix h = x;
    for (int l = 0; l < layers(); ++l) {
      Matrix z(rows(l), x.cols());
      z.noalias() = weight(l) * h;
      z.colwise() += bias(l);
      if (l + 1 < layers()) {
        z = z.cwiseMax(T(0));
      } else if (out_ == OutputActivation::tanh) {
        z = z.array().tanh().matrix();
      }
      h = std::move(z);
      if (cache) cache->acts[static_cast<std::size_t>(l) + 1] = h;
    }
    return h;
  }

  // Back-propagates dL/dy through the cached pass. Adds parameter gradients
  // to `grad` (same layout as params) unless it is null, and returns dL/dx
  // (empty when `input_grad` is false).
  Matrix backward(const Cache& cache, const Matrix& dy, Vector* grad, bool input_grad = true) const {
    if (grad && grad->size() != params_.size()) *grad = Vector::Zero(params_.size());
    Matrix delta = dy;
    if (out_ == OutputActivation::tanh) {
      const Matrix& y = cache.acts.back();
      delta = delta.cwiseProduct((T(1) - y.array().square()).matrix());
    }
    for (int l = layers() - 1; l >= 0; --l) {
      const Matrix& h = cache.acts[static_cast<std::size_t>(l)];
      if (grad) {
        weight_in(*grad, l).noalias() += delta * h.transpose();
        bias_in(*grad, l) += delta.rowwise().sum();
      }
      if (l == 0 && !input_grad) return Matrix();
      Matrix dh(cols(l), delta.cols());
      dh.noalias() = weight(l).transpose() * delta;
      if (l > 0) dh = dh.cwiseProduct((h.array() > T(0)).template cast<T>().matrix());
      delta = std::move(dh);
    }
    return delta;
  }

  bool operator==(const Mlp& o) const { return sizes_ == o.sizes_ && out_ == o.out_ && params_ == o.params_; }

 private:
  Eigen::Index rows(int l) const { return sizes_[static_cast<std::size_t>(l) + 1]; }
  Eigen::Index cols(int l) const { return sizes_[static_cast<std::size_t>(l)]; }

  std::vector<int> sizes_;
  OutputActivation out_ = OutputActivation::identity;
  std::vector<Eigen::Index> weight_offset_;
  std::vector<Eigen::Index> bias_offset_;
  Vector params_;
};

template <typename T>
struct AdamConfig {
  T lr = T(1e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

template <typename T>
class Adam {
 public:
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Adam() = default;
  Adam(Eigen::Index n, AdamConfig<T> cfg) : cfg_(cfg), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

  void step(Vector& params, const Vector& grad) {
    if (grad.size() != params.size() || params.size() != m_.size()) throw std::invalid_argument("Adam size mismatch");
    ++t_;
    m_ = cfg_.beta1 * m_ + (T(1) - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (T(1) - cfg_.beta2) * grad.cwiseAbs2();
    const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(cfg_.beta1), static_cast<double>(t_)));
    const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(cfg_.beta2), static_cast<double>(t_)));
    const T lr = cfg_.lr * std::sqrt(c2) / c1;
    params.array() -= lr * m_.array() / (v_.array().sqrt() + cfg_.eps * std::sqrt(c2));
  }

  const AdamConfig<T>& config() const { return cfg_; }
  Vector& first_moment() { return m_; }
  Vector& second_moment() { return v_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }
  std::uint64_t steps() const { return t_; }
  void set_steps(std::uint64_t t) { t_ = t; }

  bool operator==(const Adam& o) const { return t_ == o.t_ && m_ == o.m_ && v_ == o.v_; }

 private:
  AdamConfig<T> cfg_;
  Vector m_;
  Vector v_;
  std::uint64_t t_ = 0;
};

// target <- (1 - tau) target + tau online.
template <typename T>
void soft_update(Mlp<T>& target, const Mlp<T>& online, double tau) {
  if (target.sizes() != online.sizes()) throw std::invalid_argument("soft_update shape mismatch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in [0, 1]");
  if (tau == 1.0) {
    target.params() = online.params();
    return;
  }
  const T t = static_cast<T>(tau);
  target.params() = (T(1) - t) * target.params() + t * online.params();
}

}  // namespace eucaug
