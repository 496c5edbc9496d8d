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

// Random physical states for property checks: joints anywhere inside their
// limits, arbitrary heading, and the lowest contact point placed near the
// ground so the contact model is exercised.

#include <algorithm>
#include <limits>
#include <random>

#include "eucaug/dynamics.hpp"

namespace eucaug {

struct SampleOptions {
  double joint_speed = 1.0;      // stddev of joint rates, rad/s
  double root_speed = 1.0;       // stddev of root velocity coordinates
  double clearance_lo = -0.02;   // lowest contact point height range, m
  double clearance_hi = 0.03;
};

inline GeneralizedState sample_state(const Simulator& sim, std::mt19937_64& rng, const SampleOptions& opt = {}) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * uniform(rng); };

  GeneralizedState gs = sim.rest_state();
  const MorphologyTree& tree = sim.tree();
  for (std::size_t i = 1; i < sim.limb_count(); ++i) {
    const JointSpec& j = tree.joint_of(static_cast<int>(i));
    for (int k = 0; k < j.dof; ++k) {
      const auto [lo, hi] = j.angle_limits[static_cast<std::size_t>(k)];
      const int idx = sim.coordinate_offset(i) + k;
      gs.q[idx] = between(std::max(lo, -kPi), std::min(hi, kPi));
      gs.qdot[idx] = opt.joint_speed * normal(rng);
    }
  }

  const double heading = between(-kPi, kPi);
  switch (sim.root_dof()) {
    case 0:
      gs.mount.rotation = yaw_rotation(heading);
      break;
    case 3:
      gs.mount.rotation = yaw_rotation(heading);
      gs.mount.translation = Vec3(between(-1.0, 1.0), between(-1.0, 1.0), 0.0);
      gs.q[0] = between(-1.0, 1.0);
      gs.q[2] = between(-0.5, 0.5);
      for (int k = 0; k < 3; ++k) gs.qdot[k] = opt.root_speed * normal(rng);
      break;
    default:
      gs.q[0] = between(-1.0, 1.0);
      gs.q[1] = between(-1.0, 1.0);
      sim.set_root_rotation(gs, rotation_from_euler({heading, between(-0.4, 0.4), between(-0.4, 0.4)}));
      for (int k = 0; k < 6; ++k) gs.qdot[k] = opt.root_speed * normal(rng);
      break;
  }

  const TaskSpec& task = sim.task();
  if (task.is_reach()) {
    const double r = between(task.target_radius_min, task.target_radius_max);
    const double phi = between(0.0, kTwoPi);
    gs.target = gs.mount.transform(task.target_center + Vec3(r * std::cos(phi), r * std::sin(phi), 0.0));
  } else {
    gs.target = yaw_rotation(between(-kPi, kPi)) * task.target_direction;
  }

  if (sim.root_dof() != 0) {
    // Shift the root vertically so the lowest contact point sits near z = 0.
    const LimbKinematics kin = sim.forward_kinematics(gs);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sim.limb_count(); ++i) {
      for (const Vec3& p : tree.limbs[i].contact_points) {
        lowest = std::min(lowest, (kin.position[i] + kin.orientation[i] * p).z());
      }
    }
    if (std::isfinite(lowest)) {
      const double shift = between(opt.clearance_lo, opt.clearance_hi) - lowest;
      gs.q[sim.root_dof() == 3 ? 1 : 2] += shift;
    }
  }
  return gs;
}

inline Eigen::VectorXd sample_action(const Simulator& sim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd a(sim.action_size());
  for (int i = 0; i < a.size(); ++i) a[i] = uniform(rng);
  return a;
}

}  // namespace eucaug
