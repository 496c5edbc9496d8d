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

// Replay-batch augmentation: yaw rotation of limb features (euclidean), the
// torso-only rotation of joint features (joint_euclidean), and the Gaussian
// noise (gaussian_noise) and random amplitude scaling (ras) baselines.

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "eucaug/errors.hpp"
#include "eucaug/features.hpp"

namespace eucaug {

// One n-step transition: s_t, a_t, sum_k gamma^k r_{t+k}, s_{t+n}, and the
// bootstrap factor (gamma^n, smaller on truncation, 0 at a terminal).
struct Transition {
  StateVector s;
  Eigen::VectorXd a;
  double r_cum = 0.0;
  StateVector s_next;
  double discount_n = 0.0;
};

// Column-major batch: one transition per column.
struct TransitionBatch {
  LayoutPtr layout;
  Eigen::MatrixXd s;       // dim x B
  Eigen::MatrixXd a;       // m x B
  Eigen::VectorXd r_cum;   // B
  Eigen::MatrixXd s_next;  // dim x B
  Eigen::VectorXd discount_n;

  int size() const { return static_cast<int>(s.cols()); }

  bool operator==(const TransitionBatch& o) const {
    return s == o.s && a == o.a && r_cum == o.r_cum && s_next == o.s_next && discount_n == o.discount_n;
  }
};

inline TransitionBatch make_batch(const std::vector<Transition>& ts) {
  if (ts.empty()) throw std::invalid_argument("empty transition list");
  TransitionBatch b;
  b.layout = ts.front().s.layout;
  const auto dim = ts.front().s.values.size();
  const auto m = ts.front().a.size();
  const auto n = static_cast<Eigen::Index>(ts.size());
  b.s.resize(dim, n);
  b.s_next.resize(dim, n);
  b.a.resize(m, n);
  b.r_cum.resize(n);
  b.discount_n.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = ts[static_cast<std::size_t>(i)];
    if (t.s.layout != b.layout || t.s_next.layout != b.layout) throw LayoutMismatch("transitions use different layouts");
    b.s.col(i) = t.s.values;
    b.s_next.col(i) = t.s_next.values;
    b.a.col(i) = t.a;
    b.r_cum[i] = t.r_cum;
    b.discount_n[i] = t.discount_n;
  }
  return b;
}

enum class AugmentKind { none, euclidean, gaussian_noise, ras, joint_euclidean };

inline std::string to_string(AugmentKind k) {
  switch (k) {
    case AugmentKind::none:
      return "none";
    case AugmentKind::euclidean:
      return "euclidean";
    case AugmentKind::gaussian_noise:
      return "gaussian_noise";
    case AugmentKind::ras:
      return "ras";
    case AugmentKind::joint_euclidean:
      return "joint_euclidean";
  }
  return "none";
}

inline AugmentKind parse_augment_kind(const std::string& s) {
  for (AugmentKind k : {AugmentKind::none, AugmentKind::euclidean, AugmentKind::gaussian_noise, AugmentKind::ras,
                        AugmentKind::joint_euclidean}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown augmentation '" + s + "'");
}

struct AugmentConfig {
  AugmentKind kind = AugmentKind::none;
  double rho_aug = 0.0;  // fraction B_aug / B
  double gn_sigma = 1.0;
  double ras_lo = 0.5;
  double ras_hi = 1.0;
  // gaussian_noise / ras: draw the perturbation of s_next independently of
  // the one applied to s (otherwise both use the same draw).
  bool independent_next = true;
  std::uint64_t seed = 0;

  void check() const {
    if (!(rho_aug >= 0.0 && rho_aug <= 1.0)) throw ConfigError("rho_aug must be in [0, 1]");
    if (!(ras_lo <= ras_hi)) throw ConfigError("ras_lo must not exceed ras_hi");
    if (!(gn_sigma >= 0.0)) throw ConfigError("gn_sigma must be non-negative");
  }
};

// Which columns were modified and, for rotations, by which angle.
struct AugmentRecord {
  std::vector<int> selected;
  std::vector<double> alpha;
};

inline int augmented_count(double rho, int batch) {
  return static_cast<int>(std::lround(rho * batch));
}

inline StateVector rotate_state_features(const StateVector& s, double alpha) {
  StateVector out = s;
  rotate_features(*s.layout, out.values, alpha);
  return out;
}

inline StateVector joint_euclidean_rotate(const StateVector& s, double alpha) {
  if (!s.layout || s.layout->representation() != Representation::joint) {
    throw LayoutMismatch("joint_euclidean needs a joint-based layout");
  }
  return rotate_state_features(s, alpha);
}

inline void check_compatible(const AugmentConfig& cfg, const FeatureLayout& layout) {
  if (cfg.kind == AugmentKind::euclidean && layout.representation() != Representation::limb) {
    throw LayoutMismatch("euclidean augmentation needs a limb-based layout");
  }
  if (cfg.kind == AugmentKind::joint_euclidean && layout.representation() != Representation::joint) {
    throw LayoutMismatch("joint_euclidean augmentation needs a joint-based layout");
  }
}

// Augments round(rho_aug * B) columns chosen uniformly without replacement.
// Actions, rewards and discounts are never touched. With nothing selected the
// rng is not advanced.
inline AugmentRecord augment_batch(TransitionBatch& batch, const AugmentConfig& cfg, std::mt19937_64& rng) {
  cfg.check();
  if (!batch.layout) throw LayoutMismatch("batch has no layout");
  check_compatible(cfg, *batch.layout);
  AugmentRecord record;
  const int b = batch.size();
  const int count = cfg.kind == AugmentKind::none ? 0 : augmented_count(cfg.rho_aug, b);
  if (count == 0) return record;

  // Partial Fisher-Yates: the first `count` entries are the selection.
  std::vector<int> order(static_cast<std::size_t>(b));
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, b - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  record.selected.assign(order.begin(), order.begin() + count);
  std::sort(record.selected.begin(), record.selected.end());

  const FeatureLayout& layout = *batch.layout;
  const auto dim = batch.s.rows();
  switch (cfg.kind) {
    case AugmentKind::euclidean:
    case AugmentKind::joint_euclidean: {
      std::uniform_real_distribution<double> angle(0.0, kTwoPi);
      for (int col : record.selected) {
        const double alpha = angle(rng);
        auto s = batch.s.col(col);
        auto s_next = batch.s_next.col(col);
        rotate_features(layout, s, alpha);
        rotate_features(layout, s_next, alpha);
        record.alpha.push_back(alpha);
      }
      break;
    }
    case AugmentKind::gaussian_noise: {
      std::normal_distribution<double> noise(0.0, cfg.gn_sigma);
      Eigen::VectorXd z(dim);
      for (int col : record.selected) {
        for (Eigen::Index i = 0; i < dim; ++i) z[i] = noise(rng);
        batch.s.col(col) += z;
        if (cfg.independent_next) {
          for (Eigen::Index i = 0; i < dim; ++i) z[i] = noise(rng);
        }
        batch.s_next.col(col) += z;
      }
      break;
    }
    case AugmentKind::ras: {
      std::uniform_real_distribution<double> scale(cfg.ras_lo, cfg.ras_hi);
      Eigen::VectorXd z(dim);
      for (int col : record.selected) {
        for (Eigen::Index i = 0; i < dim; ++i) z[i] = cfg.ras_lo == cfg.ras_hi ? cfg.ras_lo : scale(rng);
        batch.s.col(col) = batch.s.col(col).cwiseProduct(z);
        if (cfg.independent_next) {
          for (Eigen::Index i = 0; i < dim; ++i) z[i] = cfg.ras_lo == cfg.ras_hi ? cfg.ras_lo : scale(rng);
        }
        batch.s_next.col(col) = batch.s_next.col(col).cwiseProduct(z);
      }
      break;
    }
    case AugmentKind::none:
      break;
  }
  return record;
}

}  // namespace eucaug
