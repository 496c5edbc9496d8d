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

// Reduced-coordinate rigid-body dynamics for a MorphologyTree: forward
// kinematics, composite-rigid-body mass matrix, recursive Newton-Euler bias
// forces, penalty ground contact and fixed-step integration.
//
// Generalized coordinates, root block first:
//   d1 = 0  q = ()                          fixed torso placed at `mount`
//   d1 = 3  q = (x, z, pitch)               slides and hinge in the mount frame
//   d1 = 6  q = (p, yaw, pitch, roll)       world position and EulerZYX view
//           qdot = (v, omega_body)          world linear velocity of the root
//                                           origin, body-frame angular velocity
// followed by the joint angles of limbs 1..n-1 in limb order.
//
// Every operation commutes with a rotation about the gravity axis: the
// mount, free-root pose and task target are all part of the state.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eucaug/errors.hpp"
#include "eucaug/morphology.hpp"
#include "eucaug/physics_params.hpp"
#include "eucaug/spatial.hpp"
#include "eucaug/spatial_algebra.hpp"

namespace eucaug {

struct GeneralizedState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  // Authoritative free-root orientation; q[3..5] mirrors it as EulerZYX.
  Rotation root_rotation;
  // World placement of the root's parent frame (used when d1 is 0 or 3).
  Pose mount;
  // Run/hop: unit direction. Reach: target point. World frame.
  Vec3 target = Vec3::UnitX();
};

struct LimbKinematics {
  std::vector<Vec3> position;          // frame origin p_i, world
  std::vector<Vec3> velocity;          // v_i
  std::vector<Rotation> orientation;   // R_i
  std::vector<Vec3> angular_velocity;  // omega_i
  // World-frame joint axes r_{i,1..d_i}; empty for the root.
  std::vector<std::vector<Vec3>> joint_axes;
};

struct ContactPointForce {
  int limb = 0;
  int point = 0;
  Vec3 position = Vec3::Zero();
  Vec3 force = Vec3::Zero();
  double normal = 0.0;  // magnitude of the normal component, N
};

struct StepResult {
  GeneralizedState state;
  double reward = 0.0;
  std::vector<ContactPointForce> contacts;  // evaluated at `state`
};

class Simulator {
 public:
  using Vec6 = spatial_algebra::Vec6;

  static constexpr double kBlowupVelocity = 1e6;
  static constexpr double kMinMassEigenvalue = 1e-12;

  explicit Simulator(TaskSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    counts_ = spec_.morphology.counts();
    const auto n = spec_.morphology.size();
    col_begin_.resize(n);
    col_count_.resize(n);
    col_begin_[0] = 0;
    col_count_[0] = counts_.d1;
    int offset = counts_.d1;
    for (std::size_t i = 1; i < n; ++i) {
      col_begin_[i] = offset;
      col_count_[i] = spec_.morphology.joint_of(static_cast<int>(i)).dof;
      offset += col_count_[i];
    }
  }

  const TaskSpec& task() const { return spec_; }
  const MorphologyTree& tree() const { return spec_.morphology; }
  const DofCounts& counts() const { return counts_; }
  int dof() const { return counts_.d; }
  int action_size() const { return counts_.m; }
  int root_dof() const { return counts_.d1; }
  std::size_t limb_count() const { return spec_.morphology.size(); }
  // Offset of limb i's coordinates in q (the root is limb 0).
  int coordinate_offset(std::size_t limb) const { return col_begin_[limb]; }
  int coordinate_count(std::size_t limb) const { return col_count_[limb]; }

  // Root at its rest position, identity orientation, joints at zero.
  GeneralizedState rest_state() const {
    GeneralizedState gs;
    gs.q = Eigen::VectorXd::Zero(counts_.d);
    gs.qdot = Eigen::VectorXd::Zero(counts_.d);
    const Vec3 anchor = tree().limbs[0].joint_anchor;
    switch (counts_.d1) {
      case 0:
        gs.mount.translation = anchor;
        break;
      case 3:
        gs.q[0] = anchor.x();
        gs.q[1] = anchor.z();
        break;
      default:
        gs.q.head<3>() = anchor;
        break;
    }
    gs.target = spec_.is_reach() ? gs.mount.transform(spec_.target_center) : spec_.target_direction;
    return gs;
  }

  // Sets the free-root orientation and refreshes its Euler view in q.
  void set_root_rotation(GeneralizedState& gs, const Rotation& r) const {
    gs.root_rotation = r;
    sync_root_euler(gs);
  }

  // Builds a state from coordinates; for a free root q[3..5] is read as EulerZYX.
  GeneralizedState state_from_coordinates(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const {
    GeneralizedState gs = rest_state();
    if (q.size() != counts_.d || qdot.size() != counts_.d) {
      throw std::invalid_argument("coordinate vectors must have length " + std::to_string(counts_.d));
    }
    gs.q = q;
    gs.qdot = qdot;
    if (counts_.d1 == 6) set_root_rotation(gs, rotation_from_euler({q[3], q[4], q[5]}));
    return gs;
  }

  // Initial-state distribution of the task.
  GeneralizedState reset(std::mt19937_64& rng) const {
    GeneralizedState gs = rest_state();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t i = 1; i < limb_count(); ++i) {
      const JointSpec& j = tree().joint_of(static_cast<int>(i));
      for (int k = 0; k < j.dof; ++k) {
        const auto [lo, hi] = j.angle_limits[static_cast<std::size_t>(k)];
        double angle;
        if (spec_.init.uniform_joint_angles) {
          const double a = std::max(lo, -kPi);
          const double b = std::min(hi, kPi);
          angle = a + (b - a) * uniform(rng);
        } else {
          angle = std::clamp(spec_.init.joint_noise * normal(rng), lo, hi);
        }
        const int idx = col_begin_[i] + k;
        gs.q[idx] = angle;
        gs.qdot[idx] = spec_.init.velocity_noise * normal(rng);
      }
    }
    if (spec_.is_reach()) {
      const double r = spec_.target_radius_min + (spec_.target_radius_max - spec_.target_radius_min) * uniform(rng);
      const double phi = kTwoPi * uniform(rng);
      gs.target = gs.mount.transform(spec_.target_center + Vec3(r * std::cos(phi), r * std::sin(phi), 0.0));
    }
    return gs;
  }

  LimbKinematics forward_kinematics(const GeneralizedState& gs) const {
    const Frames f = compute_frames(gs);
    LimbKinematics kin;
    const auto n = limb_count();
    kin.position = f.origin;
    kin.orientation = f.rotation;
    kin.joint_axes = f.axes;
    kin.velocity.resize(n);
    kin.angular_velocity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      kin.angular_velocity[i] = spatial_algebra::angular(f.velocity[i]);
      kin.velocity[i] = spatial_algebra::point_velocity(f.velocity[i], f.origin[i]);
    }
    return kin;
  }

  // Joint-space inertia; throws SingularMass when its smallest eigenvalue is
  // below kMinMassEigenvalue.
  Eigen::MatrixXd mass_matrix(const GeneralizedState& gs) const {
    const Frames f = compute_frames(gs);
    Eigen::MatrixXd m = composite_inertia(f);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (m.size() > 0 && !(eig.eigenvalues().minCoeff() >= kMinMassEigenvalue)) {
      throw SingularMass("mass matrix smallest eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
    }
    return m;
  }

  // Coriolis, centrifugal and gravity terms, without contact.
  Eigen::VectorXd bias_forces(const GeneralizedState& gs) const {
    const Frames f = compute_frames(gs);
    return inverse_dynamics(f, Eigen::VectorXd::Zero(counts_.d), {});
  }

  // Bias including the ground-contact wrench for `contact`.
  Eigen::VectorXd bias_forces(const GeneralizedState& gs, const ContactModel& contact) const {
    const Frames f = compute_frames(gs);
    return inverse_dynamics(f, Eigen::VectorXd::Zero(counts_.d), contact_wrenches(f, contact, nullptr));
  }

  // Torque of the action plus joint damping and limit penalties.
  Eigen::VectorXd applied_forces(const GeneralizedState& gs, const Eigen::VectorXd& action) const {
    Eigen::VectorXd tau = Eigen::VectorXd::Zero(counts_.d);
    const PhysicsParams& p = spec_.physics;
    int a = 0;
    for (std::size_t i = 1; i < limb_count(); ++i) {
      const JointSpec& j = tree().joint_of(static_cast<int>(i));
      for (int k = 0; k < j.dof; ++k, ++a) {
        const int idx = col_begin_[i] + k;
        const double q = gs.q[idx];
        const double qd = gs.qdot[idx];
        double t = j.gear[static_cast<std::size_t>(k)] * std::clamp(action[a], -1.0, 1.0) - p.joint_damping * qd;
        const auto [lo, hi] = j.angle_limits[static_cast<std::size_t>(k)];
        if (q < lo) t += p.limits.stiffness * (lo - q) - p.limits.damping * qd;
        if (q > hi) t += p.limits.stiffness * (hi - q) - p.limits.damping * qd;
        tau[idx] = t;
      }
    }
    return tau;
  }

  // qddot solving M qddot = tau(a) - bias + J^T f_contact.
  Eigen::VectorXd generalized_acceleration(const GeneralizedState& gs, const Eigen::VectorXd& action,
                                           const ContactModel& contact) const {
    check_finite(gs);
    const Frames f = compute_frames(gs);
    const Eigen::VectorXd bias = inverse_dynamics(f, Eigen::VectorXd::Zero(counts_.d), contact_wrenches(f, contact, nullptr));
    const Eigen::MatrixXd m = composite_inertia(f);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMass("mass matrix is not positive definite");
    return llt.solve(applied_forces(gs, action) - bias);
  }

  std::vector<ContactPointForce> contact_forces(const GeneralizedState& gs, const ContactModel& contact) const {
    std::vector<ContactPointForce> out;
    contact_wrenches(compute_frames(gs), contact, &out);
    return out;
  }

  std::vector<ContactPointForce> contact_forces(const GeneralizedState& gs) const {
    return contact_forces(gs, spec_.physics.contact);
  }

  // Advances one control step of `substeps` physics steps with the action held.
  StepResult step(const GeneralizedState& gs, const Eigen::VectorXd& action, const ContactModel& contact, double dt,
                  int substeps) const {
    if (action.size() != counts_.m) {
      throw std::invalid_argument("action must have length " + std::to_string(counts_.m));
    }
    const Eigen::VectorXd a = action.cwiseMax(-1.0).cwiseMin(1.0);
    const double h = dt / substeps;
    GeneralizedState x = gs;
    for (int s = 0; s < substeps; ++s) {
      x = spec_.physics.integrator == Integrator::rk4 ? rk4_step(x, a, contact, h) : euler_step(x, a, contact, h);
      check_finite(x);
    }
    StepResult result;
    result.reward = reward(x);
    result.contacts = contact_forces(x, contact);
    result.state = std::move(x);
    return result;
  }

  StepResult step(const GeneralizedState& gs, const Eigen::VectorXd& action) const {
    return step(gs, action, spec_.physics.contact, spec_.dt_control, spec_.physics_substeps);
  }

  // Rotates the physical state and task target by yaw alpha about the world z
  // axis. Non-root joint coordinates are untouched.
  GeneralizedState rotate_internal(const GeneralizedState& gs, double alpha) const {
    const Rotation r = yaw_rotation(alpha);
    GeneralizedState out = gs;
    if (counts_.d1 == 6) {
      out.q.head<3>() = r * Vec3(gs.q.head<3>());
      out.qdot.head<3>() = r * Vec3(gs.qdot.head<3>());
      set_root_rotation(out, r * gs.root_rotation);
    } else {
      out.mount = Pose{r * gs.mount.rotation, r * gs.mount.translation};
    }
    out.target = r * gs.target;
    return out;
  }

  Vec3 effector_position(const LimbKinematics& kin) const {
    const auto i = static_cast<std::size_t>(spec_.effector_limb);
    return kin.position[i] + kin.orientation[i] * spec_.effector_offset;
  }

  // t: the run direction, or the vector from the effector to the target.
  Vec3 task_vector(const GeneralizedState& gs, const LimbKinematics& kin) const {
    return spec_.is_reach() ? Vec3(gs.target - effector_position(kin)) : gs.target;
  }

  double reward(const GeneralizedState& gs) const { return reward(gs, forward_kinematics(gs)); }

  double reward(const GeneralizedState& gs, const LimbKinematics& kin) const {
    auto unit = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const double height = kin.position[0].z();
    const double speed = kin.velocity[0].dot(gs.target);
    double r = 0.0;
    switch (spec_.reward_kind) {
      case RewardKind::run:
        r = unit(speed / spec_.v_ref);
        break;
      case RewardKind::hop:
        r = 0.5 * unit(height / spec_.z_ref) + 0.5 * unit(speed / spec_.v_ref);
        break;
      case RewardKind::reach:
        r = unit(1.0 - task_vector(gs, kin).norm() / spec_.reach_ref);
        break;
      case RewardKind::stand:
        r = unit(height / spec_.z_ref);
        break;
    }
    return unit(r);
  }

  // Kinetic + gravitational + joint-limit spring energy.
  double mechanical_energy(const GeneralizedState& gs) const {
    const Frames f = compute_frames(gs);
    double kinetic = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i < limb_count(); ++i) {
      const LimbSpec& limb = tree().limbs[i];
      const spatial_algebra::Mat6 inertia = world_inertia(f, i);
      kinetic += 0.5 * f.velocity[i].dot(inertia * f.velocity[i]);
      const Vec3 com = f.origin[i] + f.rotation[i] * limb.com_offset;
      potential += limb.mass * spec_.physics.gravity * com.z();
    }
    for (std::size_t i = 1; i < limb_count(); ++i) {
      const JointSpec& j = tree().joint_of(static_cast<int>(i));
      for (int k = 0; k < j.dof; ++k) {
        const double q = gs.q[col_begin_[i] + k];
        const auto [lo, hi] = j.angle_limits[static_cast<std::size_t>(k)];
        const double excess = q < lo ? lo - q : (q > hi ? q - hi : 0.0);
        potential += 0.5 * spec_.physics.limits.stiffness * excess * excess;
      }
    }
    return kinetic + potential;
  }

  // Moves the configuration of `gs` along `velocity` for time h (the velocity
  // coordinates of the result are left as in gs).
  GeneralizedState displace(const GeneralizedState& gs, const Eigen::VectorXd& velocity, double h) const {
    GeneralizedState out = gs;
    if (counts_.d1 == 6) {
      out.q.head<3>() += h * velocity.head<3>();
      Rotation r = gs.root_rotation * Rotation::exp(h * Vec3(velocity.segment<3>(3)));
      if (r.orthonormality_error() > 1e-12) r = r.reorthonormalized();
      set_root_rotation(out, r);
      out.q.tail(counts_.d - 6) += h * velocity.tail(counts_.d - 6);
    } else {
      out.q += h * velocity;
    }
    return out;
  }

 private:
  struct Frames {
    std::vector<Rotation> rotation;
    std::vector<Vec3> origin;
    std::vector<Vec6> velocity;     // spatial, world frame
    std::vector<Vec6> bias;         // velocity-product acceleration of each joint
    std::vector<std::vector<Vec3>> axes;
    Eigen::Matrix<double, 6, Eigen::Dynamic> subspace;  // 6 x d motion subspace
  };

  void sync_root_euler(GeneralizedState& gs) const {
    if (counts_.d1 != 6) return;
    const EulerZYX e = euler_from_rotation_unchecked(gs.root_rotation);
    gs.q[3] = e.yaw;
    gs.q[4] = e.pitch;
    gs.q[5] = e.roll;
  }

  Frames compute_frames(const GeneralizedState& gs) const {
    using namespace spatial_algebra;
    if (gs.q.size() != counts_.d || gs.qdot.size() != counts_.d) {
      throw std::invalid_argument("state does not match the morphology");
    }
    const auto n = limb_count();
    Frames f;
    f.rotation.resize(n);
    f.origin.resize(n);
    f.velocity.assign(n, Vec6::Zero());
    f.bias.assign(n, Vec6::Zero());
    f.axes.resize(n);
    f.subspace.setZero(6, counts_.d);

    switch (counts_.d1) {
      case 0:
        f.rotation[0] = gs.mount.rotation;
        f.origin[0] = gs.mount.translation;
        break;
      case 3: {
        const Rotation& m = gs.mount.rotation;
        const Vec3 ux = m.column(0);
        const Vec3 uy = m.column(1);
        const Vec3 uz = m.column(2);
        f.origin[0] = gs.mount.translation + gs.q[0] * ux + gs.q[1] * uz;
        f.rotation[0] = m * pitch_rotation(gs.q[2]);
        f.subspace.col(0) = prismatic(ux);
        f.subspace.col(1) = prismatic(uz);
        f.subspace.col(2) = revolute(uy, f.origin[0]);
        const Vec3 slide_velocity = gs.qdot[0] * ux + gs.qdot[1] * uz;
        f.velocity[0] = f.subspace.leftCols<3>() * gs.qdot.head<3>();
        f.bias[0] = make(Vec3::Zero(), gs.qdot[2] * slide_velocity.cross(uy));
        break;
      }
      default: {
        const Rotation& r = gs.root_rotation;
        const Vec3 p = gs.q.head<3>();
        const Vec3 v = gs.qdot.head<3>();
        f.rotation[0] = r;
        f.origin[0] = p;
        for (int k = 0; k < 3; ++k) {
          f.subspace.col(k) = prismatic(Vec3::Unit(k));
          f.subspace.col(3 + k) = revolute(r.column(k), p);
        }
        f.velocity[0] = f.subspace.leftCols<6>() * gs.qdot.head<6>();
        f.bias[0] = make(Vec3::Zero(), v.cross(angular(f.velocity[0])));
        break;
      }
    }

    for (std::size_t i = 1; i < n; ++i) {
      const JointSpec& j = tree().joint_of(static_cast<int>(i));
      const auto parent = static_cast<std::size_t>(j.parent);
      const Vec3 anchor = f.origin[parent] + f.rotation[parent] * tree().limbs[i].joint_anchor;
      Rotation r = f.rotation[parent];
      Vec6 v = f.velocity[parent];
      Vec6 c = Vec6::Zero();
      f.axes[i].reserve(static_cast<std::size_t>(j.dof));
      for (int k = 0; k < j.dof; ++k) {
        const int idx = col_begin_[i] + k;
        const Vec3& axis = j.axes[static_cast<std::size_t>(k)];
        const Vec3 u = r * axis;
        const Vec6 s = revolute(u, anchor);
        f.subspace.col(idx) = s;
        f.axes[i].push_back(u);
        c += cross_motion(v, s) * gs.qdot[idx];
        v += s * gs.qdot[idx];
        r = r * Rotation::axis_angle(axis, gs.q[idx]);
      }
      f.rotation[i] = r;
      f.origin[i] = anchor;
      f.velocity[i] = v;
      f.bias[i] = c;
    }
    return f;
  }

  spatial_algebra::Mat6 world_inertia(const Frames& f, std::size_t i) const {
    const LimbSpec& limb = tree().limbs[i];
    const Mat3& r = f.rotation[i].matrix();
    const Vec3 com = f.origin[i] + r * limb.com_offset;
    return spatial_algebra::inertia(limb.mass, com, r * limb.inertia * r.transpose());
  }

  // Composite-rigid-body algorithm in world coordinates.
  Eigen::MatrixXd composite_inertia(const Frames& f) const {
    const auto n = limb_count();
    std::vector<spatial_algebra::Mat6> composite(n);
    for (std::size_t i = 0; i < n; ++i) composite[i] = world_inertia(f, i);
    for (std::size_t i = n; i-- > 1;) {
      composite[static_cast<std::size_t>(tree().parent_of(static_cast<int>(i)))] += composite[i];
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(counts_.d, counts_.d);
    for (std::size_t i = 0; i < n; ++i) {
      const int ci = col_count_[i];
      if (ci == 0) continue;
      const auto si = f.subspace.middleCols(col_begin_[i], ci);
      const Eigen::Matrix<double, 6, Eigen::Dynamic> force = composite[i] * si;
      m.block(col_begin_[i], col_begin_[i], ci, ci) = si.transpose() * force;
      for (int j = tree().parent_of(static_cast<int>(i)); j >= 0; j = tree().parent_of(j)) {
        const auto ju = static_cast<std::size_t>(j);
        const int cj = col_count_[ju];
        if (cj == 0) continue;
        const Eigen::MatrixXd block = f.subspace.middleCols(col_begin_[ju], cj).transpose() * force;
        m.block(col_begin_[ju], col_begin_[i], cj, ci) = block;
        m.block(col_begin_[i], col_begin_[ju], ci, cj) = block.transpose();
      }
    }
    return m;
  }

  // Recursive Newton-Euler; `external` holds one world spatial force per limb
  // (may be empty).
  Eigen::VectorXd inverse_dynamics(const Frames& f, const Eigen::VectorXd& qddot,
                                   const std::vector<Vec6>& external) const {
    using namespace spatial_algebra;
    const auto n = limb_count();
    std::vector<Vec6> accel(n);
    std::vector<Vec6> force(n);
    const Vec6 base = make(Vec3::Zero(), Vec3(0.0, 0.0, spec_.physics.gravity));
    for (std::size_t i = 0; i < n; ++i) {
      const int parent = tree().parent_of(static_cast<int>(i));
      const Vec6 a0 = parent < 0 ? base : accel[static_cast<std::size_t>(parent)];
      accel[i] = a0 + f.bias[i];
      if (col_count_[i] > 0) accel[i] += f.subspace.middleCols(col_begin_[i], col_count_[i]) * qddot.segment(col_begin_[i], col_count_[i]);
      const Mat6 inertia = world_inertia(f, i);
      force[i] = inertia * accel[i] + cross_force(f.velocity[i], inertia * f.velocity[i]);
      if (!external.empty()) force[i] -= external[i];
    }
    Eigen::VectorXd tau(counts_.d);
    for (std::size_t i = n; i-- > 0;) {
      if (col_count_[i] > 0) {
        tau.segment(col_begin_[i], col_count_[i]) = f.subspace.middleCols(col_begin_[i], col_count_[i]).transpose() * force[i];
      }
      const int parent = tree().parent_of(static_cast<int>(i));
      if (parent >= 0) force[static_cast<std::size_t>(parent)] += force[i];
    }
    return tau;
  }

  std::vector<Vec6> contact_wrenches(const Frames& f, const ContactModel& contact,
                                     std::vector<ContactPointForce>* report) const {
    using namespace spatial_algebra;
    const auto n = limb_count();
    std::vector<Vec6> wrench(n, Vec6::Zero());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& points = tree().limbs[i].contact_points;
      for (std::size_t k = 0; k < points.size(); ++k) {
        const Vec3 x = f.origin[i] + f.rotation[i] * points[k];
        Vec3 force = Vec3::Zero();
        double normal = 0.0;
        if (x.z() < 0.0) {
          const Vec3 v = point_velocity(f.velocity[i], x);
          normal = std::max(0.0, -contact.stiffness * x.z() - contact.damping * v.z());
          force = Vec3(-contact.tangential * v.x(), -contact.tangential * v.y(), normal);
          wrench[i] += point_force(x, force);
        }
        if (report) {
          report->push_back({static_cast<int>(i), static_cast<int>(k), x, force, normal});
        }
      }
    }
    return wrench;
  }

  GeneralizedState euler_step(const GeneralizedState& x, const Eigen::VectorXd& a, const ContactModel& contact,
                              double h) const {
    const Eigen::VectorXd qddot = generalized_acceleration(x, a, contact);
    const Eigen::VectorXd qdot = x.qdot + h * qddot;
    GeneralizedState out = displace(x, qdot, h);
    out.qdot = qdot;
    return out;
  }

  GeneralizedState rk4_step(const GeneralizedState& x0, const Eigen::VectorXd& a, const ContactModel& contact,
                            double h) const {
    const Eigen::VectorXd& v1 = x0.qdot;
    const Eigen::VectorXd a1 = generalized_acceleration(x0, a, contact);

    GeneralizedState x2 = displace(x0, v1, 0.5 * h);
    x2.qdot = x0.qdot + 0.5 * h * a1;
    const Eigen::VectorXd a2 = generalized_acceleration(x2, a, contact);

    GeneralizedState x3 = displace(x0, x2.qdot, 0.5 * h);
    x3.qdot = x0.qdot + 0.5 * h * a2;
    const Eigen::VectorXd a3 = generalized_acceleration(x3, a, contact);

    GeneralizedState x4 = displace(x0, x3.qdot, h);
    x4.qdot = x0.qdot + h * a3;
    const Eigen::VectorXd a4 = generalized_acceleration(x4, a, contact);

    const Eigen::VectorXd velocity = (v1 + 2.0 * x2.qdot + 2.0 * x3.qdot + x4.qdot) / 6.0;
    GeneralizedState out = displace(x0, velocity, h);
    out.qdot = x0.qdot + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    return out;
  }

  void check_finite(const GeneralizedState& x) const {
    if (!x.q.allFinite() || !x.qdot.allFinite() ||
        (x.qdot.size() > 0 && x.qdot.cwiseAbs().maxCoeff() > kBlowupVelocity)) {
      throw NumericalBlowup("generalized velocity exceeded " + std::to_string(kBlowupVelocity) + " in task " +
                            spec_.name);
    }
  }

  TaskSpec spec_;
  DofCounts counts_;
  std::vector<int> col_begin_;
  std::vector<int> col_count_;
};

// Max componentwise difference between two states of the same simulator.
// Free-root Euler angles are compared on the circle.
inline double state_distance(const Simulator& sim, const GeneralizedState& a, const GeneralizedState& b) {
  double d = (a.qdot - b.qdot).cwiseAbs().maxCoeff();
  for (int i = 0; i < a.q.size(); ++i) {
    const bool angle = sim.root_dof() == 6 && (i == 3 || i == 5);
    d = std::max(d, std::abs(angle ? angle_difference(a.q[i], b.q[i]) : a.q[i] - b.q[i]));
  }
  d = std::max(d, (a.root_rotation.matrix() - b.root_rotation.matrix()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.mount.rotation.matrix() - b.mount.rotation.matrix()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.mount.translation - b.mount.translation).cwiseAbs().maxCoeff());
  return std::max(d, (a.target - b.target).cwiseAbs().maxCoeff());
}

}  // namespace eucaug
