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

#include <cmath>
#include <random>

#include "eucaug/dynamics.hpp"
#include "eucaug/sampling.hpp"
#include "test_support.hpp"

namespace eucaug {
namespace {

using namespace testing;

TEST(DoublePendulum, MassAndBiasMatchLagrangian) {
  const Pendulum p;
  const Simulator sim(pendulum_task(p));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::normal_distribution<double> rate(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d q(angle(rng), angle(rng));
    const Eigen::Vector2d qd(rate(rng), rate(rng));
    const GeneralizedState gs = sim.state_from_coordinates(q, qd);
    EXPECT_LT(relative(sim.mass_matrix(gs), oracle_mass(p, q[1])), 1e-10);
    EXPECT_LT(relative(sim.bias_forces(gs), oracle_bias(p, q, qd)), 1e-10);
  }
}

TEST(DoublePendulum, OneControlStepMatchesOracle) {
  const Pendulum p;
  const Simulator sim(pendulum_task(p));
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> act(-1.0, 1.0);
  std::normal_distribution<double> rate(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector2d q(angle(rng), angle(rng));
    Eigen::Vector2d qd(rate(rng), rate(rng));
    const Eigen::Vector2d a(act(rng), act(rng));
    const GeneralizedState next = sim.step(sim.state_from_coordinates(q, qd), a, ContactModel::disabled(), 0.02, 20).state;
    for (int s = 0; s < 20; ++s) oracle_rk4(p, q, qd, a, 1e-3);
    EXPECT_LT(relative(next.q, q), 1e-8);
    EXPECT_LT(relative(next.qdot, qd), 1e-8);
  }
}

TEST(DoublePendulum, SemiImplicitEulerOption) {
  const Pendulum p;
  TaskSpec task = pendulum_task(p);
  task.physics.integrator = Integrator::semi_implicit_euler;
  const Simulator sim(task);
  Eigen::Vector2d q(0.3, -0.8);
  Eigen::Vector2d qd(1.0, 0.5);
  const Eigen::Vector2d a(0.2, -0.4);
  const GeneralizedState next = sim.step(sim.state_from_coordinates(q, qd), a, ContactModel::disabled(), 0.02, 20).state;
  for (int s = 0; s < 20; ++s) {
    qd += 1e-3 * oracle_accel(p, q, qd, a);
    q += 1e-3 * qd;
  }
  EXPECT_LT(relative(next.q, q), 1e-10);
  EXPECT_LT(relative(next.qdot, qd), 1e-10);
}

TEST(FreeBody, MassMatrixIsBlockDiagonal) {
  const Simulator sim(single_body_task());
  const Eigen::MatrixXd m = sim.mass_matrix(sim.rest_state());
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
  expected.topLeftCorner<3, 3>() = 2.5 * Mat3::Identity();
  expected.bottomRightCorner<3, 3>() = Vec3(0.3, 0.2, 0.1).asDiagonal();
  EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FreeBody, BallisticFall) {
  const Simulator sim(single_body_task());
  GeneralizedState gs = sim.rest_state();
  gs.qdot.tail<3>() = Vec3(0.4, -1.1, 2.0);  // spinning does not affect the COM
  const Eigen::VectorXd none(0);
  for (int s = 0; s < 25; ++s) gs = sim.step(gs, none).state;
  const double t = 0.5;
  EXPECT_NEAR(gs.q[2], 5.0 - 0.5 * 9.81 * t * t, 1e-4);
  EXPECT_NEAR(gs.qdot[2], -9.81 * t, 1e-4);
  EXPECT_NEAR(gs.q[0], 0.0, 1e-12);
}

TEST(FreeBody, SemiImplicitEulerIsFirstOrder) {
  TaskSpec task = single_body_task();
  task.physics.integrator = Integrator::semi_implicit_euler;
  const Simulator sim(task);
  GeneralizedState gs = sim.rest_state();
  for (int s = 0; s < 25; ++s) gs = sim.step(gs, Eigen::VectorXd(0)).state;
  // Each substep adds h^2 g: the error after N steps is g h t / 2.
  EXPECT_NEAR(gs.q[2] - (5.0 - 0.5 * 9.81 * 0.25), -0.5 * 9.81 * 1e-3 * 0.5, 1e-9);
}

TEST(Kinematics, RestPoseChainsAnchors) {
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    const Simulator sim(spec);
    GeneralizedState gs = sim.rest_state();
    const LimbKinematics kin = sim.forward_kinematics(gs);
    EXPECT_LT((kin.position[0] - spec.morphology.limbs[0].joint_anchor).norm(), 1e-15);
    for (std::size_t i = 0; i < sim.limb_count(); ++i) {
      EXPECT_EQ(kin.orientation[i].matrix(), Mat3::Identity());
      EXPECT_EQ(kin.velocity[i], Vec3::Zero());
      if (i == 0) continue;
      const int parent = spec.morphology.parent_of(static_cast<int>(i));
      EXPECT_LT((kin.position[i] - (kin.position[static_cast<std::size_t>(parent)] + spec.morphology.limbs[i].joint_anchor)).norm(), 1e-15);
    }
  }
}

TEST(Kinematics, QuarterTurnTwoLinkChain) {
  Pendulum p;
  p.l1 = 1.0;
  TaskSpec task = pendulum_task(p);
  task.morphology.limbs[2].contact_points = {Vec3(0.0, 0.0, -1.0)};
  const Simulator sim(task);
  const GeneralizedState gs = sim.state_from_coordinates(Eigen::Vector2d(kPi / 2.0, 0.0), Eigen::Vector2d::Zero());
  const LimbKinematics kin = sim.forward_kinematics(gs);
  // Rotating +pi/2 about y maps the hanging direction (0,0,-1) to (-1,0,0).
  const Vec3 elbow = kin.position[2];
  const Vec3 tip = kin.position[2] + kin.orientation[2] * Vec3(0.0, 0.0, -1.0);
  EXPECT_LT((elbow - Vec3(-1.0, 0.0, 2.0)).norm(), 1e-15);
  EXPECT_LT((tip - Vec3(-2.0, 0.0, 2.0)).norm(), 1e-15);
  EXPECT_LT((kin.joint_axes[2][0] - Vec3::UnitY()).norm(), 1e-15);
}

TEST(Kinematics, VelocitiesMatchFiniteDifferences) {
  const double eps = 1e-6;
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    const Simulator sim(spec);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const GeneralizedState gs = sample_state(sim, rng);
      const LimbKinematics k0 = sim.forward_kinematics(gs);
      const LimbKinematics k1 = sim.forward_kinematics(sim.displace(gs, gs.qdot, eps));
      for (std::size_t i = 0; i < sim.limb_count(); ++i) {
        const Vec3 v = (k1.position[i] - k0.position[i]) / eps;
        EXPECT_LT((v - k0.velocity[i]).norm(), 1e-4 * (1.0 + k0.velocity[i].norm()));
        const Mat3 rdot = (k1.orientation[i].matrix() - k0.orientation[i].matrix()) / eps;
        const Mat3 expected = skew(k0.angular_velocity[i]) * k0.orientation[i].matrix();
        EXPECT_LT((rdot - expected).cwiseAbs().maxCoeff(), 1e-4 * (1.0 + k0.angular_velocity[i].norm()));
      }
    }
  }
}

TEST(Kinematics, AxesAreUnitAndOrientationsProper) {
  for (const auto& [name, spec] : builtin_tasks()) {
    const Simulator sim(spec);
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 50; ++trial) {
      const LimbKinematics kin = sim.forward_kinematics(sample_state(sim, rng));
      EXPECT_TRUE(kin.joint_axes[0].empty());
      for (std::size_t i = 0; i < sim.limb_count(); ++i) {
        EXPECT_TRUE(kin.orientation[i].is_valid(1e-10)) << name;
        for (const Vec3& a : kin.joint_axes[i]) EXPECT_NEAR(a.norm(), 1.0, 1e-12) << name;
      }
    }
  }
}

TEST(MassMatrix, SymmetricPositiveDefinite) {
  for (const auto& [name, spec] : builtin_tasks()) {
    const Simulator sim(spec);
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::MatrixXd m = sim.mass_matrix(sample_state(sim, rng));
      EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12) << name;
      EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(m).info(), Eigen::Success) << name;
    }
  }
}

TEST(MassMatrix, TinyBodiesAreSingular) {
  TaskSpec task = single_body_task();
  task.morphology.limbs[0].mass = 1e-14;
  task.morphology.limbs[0].inertia = 1e-14 * Mat3::Identity();
  const Simulator sim(task);
  EXPECT_THROW(sim.mass_matrix(sim.rest_state()), SingularMass);
}

TEST(MassMatrix, PowerBalanceSkewSymmetry) {
  // qdot^T (Mdot - 2C) qdot = 0, with Mdot by central differences along qdot.
  const double eps = 1e-6;
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    TaskSpec weightless = spec;
    weightless.physics.gravity = 0.0;
    const Simulator sim(weightless);
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 50; ++trial) {
      const GeneralizedState gs = sample_state(sim, rng);
      const Eigen::MatrixXd mdot =
          (sim.mass_matrix(sim.displace(gs, gs.qdot, eps)) - sim.mass_matrix(sim.displace(gs, gs.qdot, -eps))) /
          (2.0 * eps);
      const double lhs = gs.qdot.dot(mdot * gs.qdot);
      const double rhs = 2.0 * gs.qdot.dot(sim.bias_forces(gs));
      EXPECT_LT(std::abs(lhs - rhs), 1e-5 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST(Step, EquilibriumIsExact) {
  for (const auto& [name, spec] : builtin_tasks()) {
    TaskSpec weightless = spec;
    weightless.physics.gravity = 0.0;
    const Simulator sim(weightless);
    const GeneralizedState gs = sim.rest_state();
    const GeneralizedState next = sim.step(gs, Eigen::VectorXd::Zero(sim.action_size())).state;
    EXPECT_EQ(next.q, gs.q) << name;
    EXPECT_EQ(next.qdot, gs.qdot) << name;
    EXPECT_EQ(next.root_rotation, gs.root_rotation) << name;
  }
}

TEST(Step, Deterministic) {
  for (const auto& [name, spec] : builtin_tasks()) {
    const Simulator sim(spec);
    std::mt19937_64 rng(27);
    const GeneralizedState gs = sample_state(sim, rng);
    const Eigen::VectorXd a = sample_action(sim, rng);
    const StepResult x = sim.step(gs, a);
    const StepResult y = Simulator(spec).step(gs, a);
    EXPECT_EQ(x.state.q, y.state.q) << name;
    EXPECT_EQ(x.state.qdot, y.state.qdot) << name;
    EXPECT_EQ(x.reward, y.reward) << name;
  }
}

TEST(Step, RewardInUnitInterval) {
  for (const auto& [name, spec] : builtin_tasks()) {
    const Simulator sim(spec);
    std::mt19937_64 rng(28);
    for (int trial = 0; trial < 50; ++trial) {
      const double r = sim.step(sample_state(sim, rng), sample_action(sim, rng)).reward;
      EXPECT_GE(r, 0.0) << name;
      EXPECT_LE(r, 1.0) << name;
    }
  }
}

TEST(Step, ActionTorqueIsGearTimesAction) {
  const Simulator sim(builtin_task("walker3d_run"));
  std::mt19937_64 rng(29);
  GeneralizedState gs = sim.rest_state();
  const Eigen::VectorXd a = sample_action(sim, rng);
  const Eigen::VectorXd tau = sim.applied_forces(gs, a);
  int k = 0;
  for (std::size_t i = 1; i < sim.limb_count(); ++i) {
    const JointSpec& j = sim.tree().joint_of(static_cast<int>(i));
    for (int d = 0; d < j.dof; ++d, ++k) {
      EXPECT_EQ(tau[sim.coordinate_offset(i) + d], j.gear[static_cast<std::size_t>(d)] * a[k]);
    }
  }
  EXPECT_EQ(tau.head<6>(), Eigen::VectorXd::Zero(6));
  // Out-of-range actions saturate.
  EXPECT_EQ(sim.applied_forces(gs, 5.0 * Eigen::VectorXd::Ones(sim.action_size())),
            sim.applied_forces(gs, Eigen::VectorXd::Ones(sim.action_size())));
}

TEST(Step, BlowupIsReported) {
  const Simulator sim(builtin_task("hopper2d_hop"));
  GeneralizedState gs = sim.rest_state();
  gs.qdot[4] = 2e6;
  EXPECT_THROW(sim.step(gs, Eigen::VectorXd::Zero(sim.action_size())), NumericalBlowup);
}

TEST(Step, RejectsWrongActionSize) {
  const Simulator sim(builtin_task("hopper2d_hop"));
  EXPECT_THROW(sim.step(sim.rest_state(), Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(Contact, HopperTouchesGroundAtRestAndNotInAir) {
  const Simulator sim(builtin_task("hopper2d_hop"));
  GeneralizedState gs = sim.rest_state();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sim.action_size());
  for (int t = 0; t < 10; ++t) gs = sim.step(gs, zero).state;
  const auto forces = sim.contact_forces(gs);
  int foot_points = 0;
  for (const auto& c : forces) {
    if (c.limb == 4) {
      EXPECT_GT(c.normal, 0.0);
      ++foot_points;
    }
  }
  EXPECT_EQ(foot_points, 2);
  GeneralizedState air = sim.rest_state();
  air.q[1] += 0.5;
  for (const auto& c : sim.contact_forces(air)) EXPECT_EQ(c.normal, 0.0);
}

TEST(RotateInternal, ZeroAndInvolution) {
  for (const auto& [name, spec] : builtin_tasks()) {
    const Simulator sim(spec);
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 50; ++trial) {
      const GeneralizedState gs = sample_state(sim, rng);
      EXPECT_EQ(state_distance(sim, sim.rotate_internal(gs, 0.0), gs), 0.0) << name;
      EXPECT_LT(state_distance(sim, sim.rotate_internal(sim.rotate_internal(gs, kPi), kPi), gs), 1e-12) << name;
    }
  }
}

TEST(RotateInternal, CommutesWithForwardKinematics) {
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    const Simulator sim(spec);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
      const GeneralizedState gs = sample_state(sim, rng);
      const double alpha = u(rng);
      const Rotation r = yaw_rotation(alpha);
      const GeneralizedState rotated = sim.rotate_internal(gs, alpha);
      for (int i = sim.root_dof(); i < sim.dof(); ++i) {
        EXPECT_EQ(rotated.q[i], gs.q[i]);
        EXPECT_EQ(rotated.qdot[i], gs.qdot[i]);
      }
      const LimbKinematics a = sim.forward_kinematics(gs);
      const LimbKinematics b = sim.forward_kinematics(rotated);
      for (std::size_t i = 0; i < sim.limb_count(); ++i) {
        EXPECT_LT((b.position[i] - r * a.position[i]).norm(), 1e-12);
        EXPECT_LT((b.velocity[i] - r * a.velocity[i]).norm(), 1e-12);
        EXPECT_LT((b.angular_velocity[i] - r * a.angular_velocity[i]).norm(), 1e-12);
        EXPECT_LT((b.orientation[i].matrix() - r.matrix() * a.orientation[i].matrix()).cwiseAbs().maxCoeff(), 1e-12);
        for (std::size_t k = 0; k < a.joint_axes[i].size(); ++k) {
          EXPECT_LT((b.joint_axes[i][k] - r * a.joint_axes[i][k]).norm(), 1e-12);
        }
      }
      EXPECT_NEAR(sim.reward(rotated), sim.reward(gs), 1e-12);
    }
  }
}

TEST(Symmetry, StepCommutesWithYawRotation) {
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    const Simulator sim(spec);
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
      const GeneralizedState gs = sample_state(sim, rng);
      const Eigen::VectorXd a = sample_action(sim, rng);
      const double alpha = u(rng);
      const StepResult direct = sim.step(sim.rotate_internal(gs, alpha), a);
      const StepResult base = sim.step(gs, a);
      EXPECT_LT(state_distance(sim, direct.state, sim.rotate_internal(base.state, alpha)), 1e-8);
      EXPECT_NEAR(direct.reward, base.reward, 1e-8);
    }
  }
}

TEST(Energy, ConservedWithoutContactDampingOrActuation) {
  for (const auto& [name, spec] : builtin_tasks()) {
    SCOPED_TRACE(name);
    TaskSpec task = spec;
    task.physics.contact = ContactModel::disabled();
    task.physics.joint_damping = 0.0;
    task.physics.limits.damping = 0.0;
    const Simulator sim(task);
    std::mt19937_64 rng(33);
    GeneralizedState gs = sim.reset(rng);
    std::normal_distribution<double> n(0.0, 0.5);
    for (int i = 0; i < sim.dof(); ++i) gs.qdot[i] = n(rng);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sim.action_size());
    const double e0 = sim.mechanical_energy(gs);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      gs = sim.step(gs, zero, task.physics.contact, 0.02, 20).state;
      worst = std::max(worst, std::abs(sim.mechanical_energy(gs) - e0) / std::abs(e0));
    }
    EXPECT_LT(worst, 0.01);
  }
}

}  // namespace
}  // namespace eucaug
