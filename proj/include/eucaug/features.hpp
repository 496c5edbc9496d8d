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

// State representations. Every StateVector carries a FeatureLayout that says
// how each slice transforms under a yaw rotation R_alpha:
//   equivariant3  3-vector, x -> R_alpha x
//   invariant     unchanged
//   yaw_angle     heading angle, b -> wrap(b + alpha)
//
// Limb layout:  R_1 columns, omega_1, (p_i - p_1, v_i) per limb, world axes of
//               every joint with more than one DoF, task vector, sensors.
// Joint layout: root coordinates, joint angles, root velocities, joint rates,
//               task vector, sensors.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eucaug/dynamics.hpp"
#include "eucaug/errors.hpp"
#include "eucaug/morphology.hpp"
#include "eucaug/spatial.hpp"

namespace eucaug {

enum class FeatureTag { equivariant3, invariant, yaw_angle };

inline std::string to_string(FeatureTag t) {
  switch (t) {
    case FeatureTag::equivariant3:
      return "equivariant3";
    case FeatureTag::invariant:
      return "invariant";
    case FeatureTag::yaw_angle:
      return "yaw_angle";
  }
  return "invariant";
}

inline FeatureTag parse_feature_tag(const std::string& s) {
  if (s == "equivariant3") return FeatureTag::equivariant3;
  if (s == "invariant") return FeatureTag::invariant;
  if (s == "yaw_angle") return FeatureTag::yaw_angle;
  throw ParseError("unknown feature tag '" + s + "'");
}

struct FeatureSlice {
  std::string name;
  int offset = 0;
  int length = 0;
  FeatureTag tag = FeatureTag::invariant;

  bool operator==(const FeatureSlice&) const = default;
};

class FeatureLayout {
 public:
  FeatureLayout() = default;
  explicit FeatureLayout(Representation repr) : repr_(repr) {}

  Representation representation() const { return repr_; }
  const std::vector<FeatureSlice>& slices() const { return slices_; }
  int dimension() const { return dim_; }

  void append(std::string name, FeatureTag tag, int length = 1) {
    if (tag == FeatureTag::equivariant3 && length != 3) {
      throw std::invalid_argument("equivariant3 slices have length 3");
    }
    if (tag == FeatureTag::yaw_angle && length != 1) throw std::invalid_argument("yaw_angle slices have length 1");
    if (length < 1) throw std::invalid_argument("slice length must be positive");
    slices_.push_back({std::move(name), dim_, length, tag});
    dim_ += length;
  }

  // Replaces the tag of slice `index`; used to build deliberately wrong
  // layouts for negative controls.
  void retag(std::size_t index, FeatureTag tag) {
    FeatureSlice& s = slices_.at(index);
    if ((tag == FeatureTag::equivariant3 && s.length != 3) || (tag == FeatureTag::yaw_angle && s.length != 1)) {
      throw std::invalid_argument("tag does not fit the slice length");
    }
    s.tag = tag;
  }

  const FeatureSlice* find(const std::string& name) const {
    for (const auto& s : slices_) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  // Number of components whose value changes under some rotation.
  int variant_components() const {
    int n = 0;
    for (const auto& s : slices_) {
      if (s.tag != FeatureTag::invariant) n += s.length;
    }
    return n;
  }

  bool operator==(const FeatureLayout&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& s : slices_) {
      slices.push_back({{"name", s.name}, {"offset", s.offset}, {"length", s.length}, {"tag", eucaug::to_string(s.tag)}});
    }
    return {{"representation", eucaug::to_string(repr_)}, {"dimension", dim_}, {"slices", slices}};
  }

  static FeatureLayout from_json(const nlohmann::json& j) {
    try {
      FeatureLayout layout(parse_representation(j.at("representation").get<std::string>()));
      for (const auto& s : j.at("slices")) {
        if (s.at("offset").get<int>() != layout.dim_) throw ParseError("layout slices must be contiguous");
        layout.append(s.at("name").get<std::string>(), parse_feature_tag(s.at("tag").get<std::string>()),
                      s.at("length").get<int>());
      }
      if (j.at("dimension").get<int>() != layout.dim_) throw ParseError("layout dimension does not match its slices");
      return layout;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed feature layout: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("malformed feature layout: ") + e.what());
    } catch (const ConfigError& e) {
      throw ParseError(std::string("malformed feature layout: ") + e.what());
    }
  }

 private:
  Representation repr_ = Representation::limb;
  std::vector<FeatureSlice> slices_;
  int dim_ = 0;
};

using LayoutPtr = std::shared_ptr<const FeatureLayout>;

struct StateVector {
  Eigen::VectorXd values;
  LayoutPtr layout;
};

// Applies the yaw rotation alpha to one feature vector in place, using only
// the layout tags.
template <typename Derived>
void rotate_features(const FeatureLayout& layout, Eigen::MatrixBase<Derived>& values, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  for (const auto& slice : layout.slices()) {
    switch (slice.tag) {
      case FeatureTag::invariant:
        break;
      case FeatureTag::equivariant3: {
        const double x = values[slice.offset];
        const double y = values[slice.offset + 1];
        values[slice.offset] = c * x - s * y;
        values[slice.offset + 1] = s * x + c * y;
        break;
      }
      case FeatureTag::yaw_angle:
        values[slice.offset] = wrap_angle(values[slice.offset] + alpha);
        break;
    }
  }
}

// Max componentwise difference, with yaw slices compared on the circle.
inline double feature_distance(const FeatureLayout& layout, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double d = 0.0;
  for (const auto& slice : layout.slices()) {
    for (int k = 0; k < slice.length; ++k) {
      const int i = slice.offset + k;
      const double diff = slice.tag == FeatureTag::yaw_angle ? angle_difference(a[i], b[i]) : a[i] - b[i];
      d = std::max(d, std::abs(diff));
    }
  }
  return d;
}

struct FeatureOptions {
  // Joint layout, free root: observe the root linear velocity as a world
  // vector (equivariant3). When false it is expressed in the torso frame and
  // tagged invariant.
  bool root_velocity_world = true;
};

inline FeatureLayout make_limb_layout(const Simulator& sim) {
  const MorphologyTree& tree = sim.tree();
  FeatureLayout layout(Representation::limb);
  for (int c = 0; c < 3; ++c) layout.append("R1[:," + std::to_string(c) + "]", FeatureTag::equivariant3, 3);
  layout.append("omega1", FeatureTag::equivariant3, 3);
  for (const auto& limb : tree.limbs) {
    layout.append("p." + limb.name, FeatureTag::equivariant3, 3);
    layout.append("v." + limb.name, FeatureTag::equivariant3, 3);
  }
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const JointSpec& j = tree.joint_of(static_cast<int>(i));
    if (j.dof < 2) continue;
    for (int k = 0; k < j.dof; ++k) layout.append("axis." + j.name + "." + std::to_string(k), FeatureTag::equivariant3, 3);
  }
  layout.append("task", FeatureTag::equivariant3, 3);
  return layout;
}

inline FeatureLayout make_joint_layout(const Simulator& sim, const FeatureOptions& opt) {
  const MorphologyTree& tree = sim.tree();
  FeatureLayout layout(Representation::joint);
  auto joint_block = [&](const char* prefix) {
    for (std::size_t i = 1; i < tree.size(); ++i) {
      const JointSpec& j = tree.joint_of(static_cast<int>(i));
      for (int k = 0; k < j.dof; ++k) {
        layout.append(std::string(prefix) + j.name + (j.dof > 1 ? "." + std::to_string(k) : ""), FeatureTag::invariant);
      }
    }
  };
  switch (sim.root_dof()) {
    case 3:
      layout.append("root.q", FeatureTag::invariant, 3);  // (0, z, pitch) in the mount frame
      joint_block("q.");
      layout.append("root.qdot", FeatureTag::invariant, 3);
      joint_block("qdot.");
      layout.append("task", FeatureTag::invariant, 3);  // mount frame
      break;
    case 6:
      layout.append("root.position", FeatureTag::equivariant3, 3);  // (0, 0, z)
      layout.append("root.yaw", FeatureTag::yaw_angle);
      layout.append("root.pitch_roll", FeatureTag::invariant, 2);
      joint_block("q.");
      if (opt.root_velocity_world) {
        layout.append("root.velocity", FeatureTag::equivariant3, 3);
      } else {
        layout.append("root.velocity", FeatureTag::invariant, 3);
      }
      layout.append("root.angular_velocity", FeatureTag::invariant, 3);  // torso frame
      joint_block("qdot.");
      layout.append("task", FeatureTag::equivariant3, 3);
      break;
    default:
      joint_block("q.");
      joint_block("qdot.");
      layout.append("task", FeatureTag::invariant, 3);  // mount frame
      break;
  }
  return layout;
}

inline void append_sensor_layout(const TaskSpec& task, FeatureLayout& layout) {
  for (const auto& s : task.sensors) {
    if (s.kind == SensorKind::target_vector && s.tag == SensorTag::equivariant) {
      layout.append("sensor." + s.name, FeatureTag::equivariant3, 3);
    } else {
      layout.append("sensor." + s.name, FeatureTag::invariant, s.dimension());
    }
  }
}

// Sensor block. Touch: normal force at one contact point. Torso height:
// world z of the root origin. Target vector: effector minus target, in the
// torso frame (invariant tag) or the world frame (equivariant tag).
inline Eigen::VectorXd sensors(const Simulator& sim, const GeneralizedState& gs, const LimbKinematics& kin,
                               const std::vector<ContactPointForce>& contacts) {
  const TaskSpec& task = sim.task();
  Eigen::VectorXd out(task.sensor_dimension());
  int at = 0;
  for (const auto& s : task.sensors) {
    switch (s.kind) {
      case SensorKind::touch: {
        double normal = 0.0;
        for (const auto& c : contacts) {
          if (c.limb == s.limb && c.point == s.point) normal = c.normal;
        }
        out[at++] = normal;
        break;
      }
      case SensorKind::torso_height:
        out[at++] = kin.position[0].z();
        break;
      case SensorKind::target_vector: {
        Vec3 v = sim.effector_position(kin) - gs.target;
        if (s.tag == SensorTag::invariant) v = kin.orientation[0].matrix().transpose() * v;
        out.segment<3>(at) = v;
        at += 3;
        break;
      }
    }
  }
  return out;
}

inline Eigen::VectorXd limb_features(const Simulator& sim, const GeneralizedState& gs, const LimbKinematics& kin,
                                     const std::vector<ContactPointForce>& contacts) {
  const MorphologyTree& tree = sim.tree();
  const int dim = feature_dimension(sim.task(), Representation::limb);
  Eigen::VectorXd x(dim);
  int at = 0;
  auto put = [&](const Vec3& v) {
    x.segment<3>(at) = v;
    at += 3;
  };
  for (int c = 0; c < 3; ++c) put(kin.orientation[0].column(c));
  put(kin.angular_velocity[0]);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    put(kin.position[i] - kin.position[0]);
    put(kin.velocity[i]);
  }
  for (std::size_t i = 1; i < tree.size(); ++i) {
    if (tree.joint_of(static_cast<int>(i)).dof < 2) continue;
    for (const Vec3& axis : kin.joint_axes[i]) put(axis);
  }
  put(sim.task_vector(gs, kin));
  x.tail(sim.task().sensor_dimension()) = sensors(sim, gs, kin, contacts);
  return x;
}

inline Eigen::VectorXd joint_features(const Simulator& sim, const GeneralizedState& gs, const LimbKinematics& kin,
                                      const std::vector<ContactPointForce>& contacts, const FeatureOptions& opt) {
  const int d1 = sim.root_dof();
  const int m = sim.dof() - d1;
  const int dim = feature_dimension(sim.task(), Representation::joint);
  Eigen::VectorXd x(dim);
  int at = 0;
  const Mat3 mount_t = gs.mount.rotation.matrix().transpose();
  const Vec3 task = sim.task_vector(gs, kin);
  switch (d1) {
    case 3:
      x.segment<3>(at) = Vec3(0.0, gs.q[1], gs.q[2]);
      at += 3;
      x.segment(at, m) = gs.q.tail(m);
      at += m;
      x.segment<3>(at) = gs.qdot.head<3>();
      at += 3;
      x.segment(at, m) = gs.qdot.tail(m);
      at += m;
      x.segment<3>(at) = mount_t * task;
      at += 3;
      break;
    case 6: {
      x.segment<3>(at) = Vec3(0.0, 0.0, gs.q[2]);
      x.segment<3>(at + 3) = gs.q.segment<3>(3);
      at += 6;
      x.segment(at, m) = gs.q.tail(m);
      at += m;
      const Vec3 v = gs.qdot.head<3>();
      x.segment<3>(at) = opt.root_velocity_world ? v : Vec3(gs.root_rotation.matrix().transpose() * v);
      x.segment<3>(at + 3) = gs.qdot.segment<3>(3);
      at += 6;
      x.segment(at, m) = gs.qdot.tail(m);
      at += m;
      x.segment<3>(at) = task;
      at += 3;
      break;
    }
    default:
      x.segment(at, m) = gs.q.tail(m);
      at += m;
      x.segment(at, m) = gs.qdot.tail(m);
      at += m;
      x.segment<3>(at) = mount_t * task;
      at += 3;
      break;
  }
  x.tail(sim.task().sensor_dimension()) = sensors(sim, gs, kin, contacts);
  return x;
}

// Builds StateVectors of one representation for one simulator. The layout is
// computed once and shared by every vector the builder produces.
class FeatureBuilder {
 public:
  FeatureBuilder(const Simulator& sim, Representation repr, FeatureOptions opt = {})
      : sim_(&sim), repr_(repr), opt_(opt) {
    FeatureLayout layout = repr == Representation::limb ? make_limb_layout(sim) : make_joint_layout(sim, opt);
    append_sensor_layout(sim.task(), layout);
    layout_ = std::make_shared<const FeatureLayout>(std::move(layout));
  }

  Representation representation() const { return repr_; }
  const LayoutPtr& layout() const { return layout_; }
  int dimension() const { return layout_->dimension(); }

  Eigen::VectorXd features(const GeneralizedState& gs) const {
    const LimbKinematics kin = sim_->forward_kinematics(gs);
    const auto contacts = sim_->contact_forces(gs);
    return repr_ == Representation::limb ? limb_features(*sim_, gs, kin, contacts)
                                         : joint_features(*sim_, gs, kin, contacts, opt_);
  }

  StateVector build(const GeneralizedState& gs) const { return {features(gs), layout_}; }

 private:
  const Simulator* sim_;
  Representation repr_;
  FeatureOptions opt_;
  LayoutPtr layout_;
};

inline StateVector build_limb_state(const Simulator& sim, const GeneralizedState& gs) {
  return FeatureBuilder(sim, Representation::limb).build(gs);
}

inline StateVector build_joint_state(const Simulator& sim, const GeneralizedState& gs, FeatureOptions opt = {}) {
  return FeatureBuilder(sim, Representation::joint, opt).build(gs);
}

// Recovers a physical state from joint features. Quantities the
// representation does not observe are fixed: the horizontal root position is
// zero, the mount is the identity, and for d1 in {0, 3} the target is placed
// from the mount-frame task vector.
inline GeneralizedState decode_joint_state(const Simulator& sim, const Eigen::VectorXd& x, FeatureOptions opt = {}) {
  const int d1 = sim.root_dof();
  const int m = sim.dof() - d1;
  GeneralizedState gs = sim.rest_state();
  gs.mount = Pose{};
  int at = 0;
  switch (d1) {
    case 3:
      gs.q[0] = 0.0;
      gs.q[1] = x[at + 1];
      gs.q[2] = x[at + 2];
      at += 3;
      gs.q.tail(m) = x.segment(at, m);
      at += m;
      gs.qdot.head<3>() = x.segment<3>(at);
      at += 3;
      gs.qdot.tail(m) = x.segment(at, m);
      at += m;
      break;
    case 6: {
      gs.q.head<3>() = Vec3(0.0, 0.0, x[at + 2]);
      sim.set_root_rotation(gs, rotation_from_euler({x[at + 3], x[at + 4], x[at + 5]}));
      at += 6;
      gs.q.tail(m) = x.segment(at, m);
      at += m;
      const Vec3 v = x.segment<3>(at);
      gs.qdot.head<3>() = opt.root_velocity_world ? v : Vec3(gs.root_rotation * v);
      gs.qdot.segment<3>(3) = x.segment<3>(at + 3);
      at += 6;
      gs.qdot.tail(m) = x.segment(at, m);
      at += m;
      break;
    }
    default:
      gs.q.tail(m) = x.segment(at, m);
      at += m;
      gs.qdot.tail(m) = x.segment(at, m);
      at += m;
      break;
  }
  const Vec3 task = x.segment<3>(at);
  if (sim.task().is_reach()) {
    gs.target = sim.effector_position(sim.forward_kinematics(gs)) + task;
  } else {
    gs.target = task;
  }
  return gs;
}

}  // namespace eucaug
