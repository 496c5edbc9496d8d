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

// Declarative agent and task descriptions: limbs, joints, actuation, reward
// kind, target features and sensors. Documents are JSON with top-level keys
// `name`, `root`, `limbs`, `joints`, `task` and `sensors`.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eucaug/builtin_task_documents.hpp"
#include "eucaug/errors.hpp"
#include "eucaug/physics_params.hpp"
#include "eucaug/spatial.hpp"

namespace eucaug {

struct LimbSpec {
  std::string name;
  double mass = 1.0;                  // kg
  Mat3 inertia = Mat3::Identity();    // about the COM, body frame, kg m^2
  Vec3 com_offset = Vec3::Zero();     // body frame, m
  Vec3 joint_anchor = Vec3::Zero();   // parent frame, m (root: rest position in world)
  std::vector<Vec3> contact_points;   // body frame, m
};

struct JointSpec {
  std::string name;
  int parent = 0;
  int child = 1;
  int dof = 1;
  // Axis k is expressed in the frame obtained after the rotations about
  // axes 0..k-1, starting from the parent frame.
  std::vector<Vec3> axes;
  std::vector<std::pair<double, double>> angle_limits;  // rad
  std::vector<double> gear;                              // N m per unit action
};

// 0: fixed torso. 3: planar (x-slide, z-slide, y-hinge). 6: free.
struct RootSpec {
  int dof = 6;
};

// DoF bookkeeping. n counts limbs including the torso.
struct DofCounts {
  int n = 0;
  int d1 = 0;
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  int m = 0;  // action size, sum of joint DoFs
  int d = 0;  // generalized coordinates, d1 + m

  bool operator==(const DofCounts&) const = default;
};

// Limbs are topologically ordered with limb 0 the torso. After validation
// joints[k] is the joint whose child is limb k + 1.
struct MorphologyTree {
  std::vector<LimbSpec> limbs;
  std::vector<JointSpec> joints;
  RootSpec root;

  std::size_t size() const { return limbs.size(); }
  const JointSpec& joint_of(int child) const { return joints.at(static_cast<std::size_t>(child - 1)); }
  int parent_of(int limb) const { return limb == 0 ? -1 : joint_of(limb).parent; }

  DofCounts counts() const {
    DofCounts c;
    c.n = static_cast<int>(limbs.size());
    c.d1 = root.dof;
    for (const auto& j : joints) {
      if (j.dof == 1) ++c.n1;
      if (j.dof == 2) ++c.n2;
      if (j.dof == 3) ++c.n3;
      c.m += j.dof;
    }
    c.d = c.d1 + c.m;
    return c;
  }

  // Offset of limb `child`'s joint coordinates inside q.
  int joint_coordinate_offset(int child) const {
    int offset = root.dof;
    for (int k = 1; k < child; ++k) offset += joint_of(k).dof;
    return offset;
  }
};

enum class RewardKind { run, hop, reach, stand };
enum class SensorKind { touch, torso_height, target_vector };
enum class SensorTag { invariant, equivariant };
enum class Representation { joint, limb };

struct SensorSpec {
  std::string name;
  SensorKind kind = SensorKind::touch;
  SensorTag tag = SensorTag::invariant;
  int limb = 0;   // touch: limb carrying the contact point
  int point = 0;  // touch: index into that limb's contact_points

  int dimension() const { return kind == SensorKind::target_vector ? 3 : 1; }
};

// How reset() draws initial states.
struct InitSpec {
  double joint_noise = 0.1;        // std of joint-angle noise, rad
  double velocity_noise = 0.0;     // std of joint-rate noise, rad/s
  bool uniform_joint_angles = false;  // draw joint angles uniformly inside limits
};

struct TaskSpec {
  std::string name;
  MorphologyTree morphology;
  RewardKind reward_kind = RewardKind::run;
  Vec3 target_direction = Vec3::UnitX();  // run/hop
  // reach: the effector is a marker point on `effector_limb`; the target is
  // drawn uniformly in an annulus around `target_center` in the mount xy-plane.
  int effector_limb = 0;
  Vec3 effector_offset = Vec3::Zero();
  Vec3 target_center = Vec3::Zero();
  double target_radius_min = 0.0;
  double target_radius_max = 0.0;
  double v_ref = 1.0;      // m/s
  double z_ref = 1.0;      // m
  double reach_ref = 0.2;  // m
  int episode_steps = 1000;
  double dt_control = 0.02;
  int physics_substeps = 20;
  PhysicsParams physics;
  InitSpec init;
  std::vector<SensorSpec> sensors;

  double dt_physics() const { return dt_control / physics_substeps; }
  bool is_reach() const { return reward_kind == RewardKind::reach; }
  int sensor_dimension() const {
    int total = 0;
    for (const auto& s : sensors) total += s.dimension();
    return total;
  }
};

namespace detail {

using nlohmann::json;

inline std::string idx(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(path + ": missing key '" + key + "'");
  }
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
  return j.get<int>();
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected [x, y, z]");
  return Vec3(number(j[0], path), number(j[1], path), number(j[2], path));
}

inline Mat3 inertia(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  Mat3 m = Mat3::Zero();
  if (j.size() == 3 && j[0].is_number()) {
    for (int i = 0; i < 3; ++i) m(i, i) = number(j[i], path);
    return m;
  }
  if (j.size() != 3) throw ParseError(path + ": expected 3 diagonal entries or a 3x3 matrix");
  for (int r = 0; r < 3; ++r) {
    const Vec3 row = vec3(j[r], idx(path, r));
    m.row(r) = row.transpose();
  }
  return m;
}

inline double optional_number(const json& j, const char* key, double fallback, const std::string& path) {
  return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

inline RewardKind parse_reward(const std::string& s, const std::string& path) {
  if (s == "run") return RewardKind::run;
  if (s == "hop") return RewardKind::hop;
  if (s == "reach") return RewardKind::reach;
  if (s == "stand") return RewardKind::stand;
  throw ParseError(path + ": unknown reward kind '" + s + "'");
}

inline SensorKind parse_sensor_kind(const std::string& s, const std::string& path) {
  if (s == "touch") return SensorKind::touch;
  if (s == "torso_height") return SensorKind::torso_height;
  if (s == "target_vector") return SensorKind::target_vector;
  throw ParseError(path + ": unknown sensor type '" + s + "'");
}

inline Integrator parse_integrator(const std::string& s, const std::string& path) {
  if (s == "rk4") return Integrator::rk4;
  if (s == "semi_implicit_euler") return Integrator::semi_implicit_euler;
  throw ParseError(path + ": unknown integrator '" + s + "'");
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

}  // namespace detail

inline std::string to_string(RewardKind k) {
  switch (k) {
    case RewardKind::run: return "run";
    case RewardKind::hop: return "hop";
    case RewardKind::reach: return "reach";
    case RewardKind::stand: return "stand";
  }
  return "?";
}

inline std::string to_string(SensorKind k) {
  switch (k) {
    case SensorKind::touch: return "touch";
    case SensorKind::torso_height: return "torso_height";
    case SensorKind::target_vector: return "target_vector";
  }
  return "?";
}

inline std::string to_string(SensorTag t) {
  return t == SensorTag::invariant ? "invariant" : "equivariant";
}

inline std::string to_string(Representation r) { return r == Representation::joint ? "joint" : "limb"; }

inline Representation parse_representation(const std::string& s) {
  if (s == "joint") return Representation::joint;
  if (s == "limb") return Representation::limb;
  throw ConfigError("unknown representation '" + s + "' (expected joint or limb)");
}

// Checks every invariant of a task and puts joints in child order. Throws
// ValidationError naming the offending field.
inline void validate(TaskSpec& spec) {
  MorphologyTree& tree = spec.morphology;
  const auto n = tree.limbs.size();
  if (n == 0) throw ValidationError("limbs", "at least one limb is required");
  if (tree.root.dof != 0 && tree.root.dof != 3 && tree.root.dof != 6) {
    throw ValidationError("root.dof", "must be 0, 3 or 6");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const LimbSpec& limb = tree.limbs[i];
    const std::string path = detail::idx("limbs", i);
    if (!(limb.mass > 0.0) || !std::isfinite(limb.mass)) {
      throw ValidationError(path + ".mass", "must be positive");
    }
    if ((limb.inertia - limb.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw ValidationError(path + ".inertia", "must be symmetric");
    }
    Eigen::LLT<Mat3> llt(limb.inertia);
    if (llt.info() != Eigen::Success || !limb.inertia.allFinite()) {
      throw ValidationError(path + ".inertia", "must be positive definite");
    }
  }
  if (tree.joints.size() != n - 1) {
    throw ValidationError("joints", "a tree of " + std::to_string(n) + " limbs needs " +
                                        std::to_string(n - 1) + " joints");
  }
  std::vector<int> joint_of_child(n, -1);
  for (std::size_t k = 0; k < tree.joints.size(); ++k) {
    const JointSpec& j = tree.joints[k];
    const std::string path = detail::idx("joints", k);
    if (j.parent == j.child) throw ValidationError(path, "parent and child are the same limb");
    if (j.parent < 0 || static_cast<std::size_t>(j.parent) >= n) {
      throw ValidationError(path + ".parent", "limb index out of range");
    }
    if (j.child <= 0 || static_cast<std::size_t>(j.child) >= n) {
      throw ValidationError(path + ".child", "must name a non-root limb");
    }
    if (j.parent > j.child) {
      throw ValidationError(path, "limbs must be topologically ordered (parent < child)");
    }
    if (joint_of_child[static_cast<std::size_t>(j.child)] != -1) {
      throw ValidationError(path + ".child", "limb already has a parent joint (cycle)");
    }
    joint_of_child[static_cast<std::size_t>(j.child)] = static_cast<int>(k);
    if (j.dof < 1 || j.dof > 3) throw ValidationError(path + ".dof", "must be 1, 2 or 3");
    if (static_cast<int>(j.axes.size()) != j.dof) {
      throw ValidationError(path + ".axes", "needs exactly dof axes");
    }
    for (int a = 0; a < j.dof; ++a) {
      for (int b = a; b < j.dof; ++b) {
        const double dot = j.axes[a].dot(j.axes[b]);
        const double expected = a == b ? 1.0 : 0.0;
        if (std::abs(dot - expected) > 1e-9) {
          throw ValidationError(path + ".axes", "axes must be orthonormal");
        }
      }
    }
    if (static_cast<int>(j.angle_limits.size()) != j.dof) {
      throw ValidationError(path + ".angle_limits", "needs one (lo, hi) pair per DoF");
    }
    for (std::size_t a = 0; a < j.angle_limits.size(); ++a) {
      if (!(j.angle_limits[a].first < j.angle_limits[a].second)) {
        throw ValidationError(detail::idx(path + ".angle_limits", a), "requires lo < hi");
      }
    }
    if (static_cast<int>(j.gear.size()) != j.dof) {
      throw ValidationError(path + ".gear", "needs one gear per DoF");
    }
    for (double g : j.gear) {
      if (!(g >= 0.0)) throw ValidationError(path + ".gear", "must be non-negative");
    }
  }
  std::vector<JointSpec> ordered;
  ordered.reserve(tree.joints.size());
  for (std::size_t c = 1; c < n; ++c) ordered.push_back(tree.joints[static_cast<std::size_t>(joint_of_child[c])]);
  tree.joints = std::move(ordered);

  const bool directional = spec.reward_kind == RewardKind::run || spec.reward_kind == RewardKind::hop;
  if (directional && std::abs(spec.target_direction.norm() - 1.0) > 1e-9) {
    throw ValidationError("task.target_direction", "must be a unit vector");
  }
  if (spec.is_reach()) {
    if (spec.effector_limb < 0 || static_cast<std::size_t>(spec.effector_limb) >= n) {
      throw ValidationError("task.effector_limb", "limb index out of range");
    }
    if (!(spec.target_radius_min >= 0.0 && spec.target_radius_min <= spec.target_radius_max)) {
      throw ValidationError("task.target_radius", "requires 0 <= min <= max");
    }
    if (!(spec.reach_ref > 0.0)) throw ValidationError("task.reach_ref", "must be positive");
  }
  if (!(spec.v_ref > 0.0)) throw ValidationError("task.v_ref", "must be positive");
  if (!(spec.z_ref > 0.0)) throw ValidationError("task.z_ref", "must be positive");
  if (spec.episode_steps != 1000) {
    throw ValidationError("task.episode_steps", "episodes are 1000 control steps");
  }
  if (!(spec.dt_control > 0.0)) throw ValidationError("task.dt_control", "must be positive");
  if (spec.physics_substeps < 1) throw ValidationError("task.physics_substeps", "must be >= 1");
  const PhysicsParams& p = spec.physics;
  if (p.gravity < 0.0 || p.joint_damping < 0.0 || p.contact.stiffness < 0.0 || p.contact.damping < 0.0 ||
      p.contact.tangential < 0.0 || p.limits.stiffness < 0.0 || p.limits.damping < 0.0) {
    throw ValidationError("task.physics", "coefficients must be non-negative");
  }
  for (std::size_t s = 0; s < spec.sensors.size(); ++s) {
    const SensorSpec& sensor = spec.sensors[s];
    const std::string path = detail::idx("sensors", s);
    if (sensor.kind == SensorKind::touch) {
      if (sensor.limb < 0 || static_cast<std::size_t>(sensor.limb) >= n) {
        throw ValidationError(path + ".limb", "limb index out of range");
      }
      const auto& points = tree.limbs[static_cast<std::size_t>(sensor.limb)].contact_points;
      if (sensor.point < 0 || static_cast<std::size_t>(sensor.point) >= points.size()) {
        throw ValidationError(path + ".point", "contact point index out of range");
      }
    }
    const bool scalar = sensor.kind != SensorKind::target_vector;
    if (scalar && sensor.tag != SensorTag::invariant) {
      throw ValidationError(path + ".tag", "scalar sensors are rotation invariant");
    }
    if (sensor.kind == SensorKind::target_vector && !spec.is_reach()) {
      throw ValidationError(path + ".type", "target_vector requires a reach task");
    }
  }
}

// Parses and validates a task-spec document.
inline TaskSpec load_morphology(std::string_view document) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");

  TaskSpec spec;
  try {
    spec.name = doc.value("name", std::string());
    const json& root = detail::require(doc, "root", "");
    spec.morphology.root.dof = detail::integer(detail::require(root, "dof", "root"), "root.dof");

    const json& limbs = detail::require(doc, "limbs", "");
    if (!limbs.is_array()) throw ParseError("limbs: expected an array");
    for (std::size_t i = 0; i < limbs.size(); ++i) {
      const json& l = limbs[i];
      const std::string path = detail::idx("limbs", i);
      LimbSpec limb;
      limb.name = l.value("name", "limb" + std::to_string(i));
      limb.mass = detail::number(detail::require(l, "mass", path), path + ".mass");
      limb.inertia = detail::inertia(detail::require(l, "inertia", path), path + ".inertia");
      if (l.contains("com_offset")) limb.com_offset = detail::vec3(l.at("com_offset"), path + ".com_offset");
      if (l.contains("joint_anchor")) limb.joint_anchor = detail::vec3(l.at("joint_anchor"), path + ".joint_anchor");
      if (l.contains("contact_points")) {
        const json& pts = l.at("contact_points");
        if (!pts.is_array()) throw ParseError(path + ".contact_points: expected an array");
        for (std::size_t p = 0; p < pts.size(); ++p) {
          limb.contact_points.push_back(detail::vec3(pts[p], detail::idx(path + ".contact_points", p)));
        }
      }
      spec.morphology.limbs.push_back(std::move(limb));
    }

    const json& joints = detail::require(doc, "joints", "");
    if (!joints.is_array()) throw ParseError("joints: expected an array");
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const json& jj = joints[k];
      const std::string path = detail::idx("joints", k);
      JointSpec j;
      j.name = jj.value("name", "joint" + std::to_string(k));
      j.parent = detail::integer(detail::require(jj, "parent", path), path + ".parent");
      j.child = detail::integer(detail::require(jj, "child", path), path + ".child");
      j.dof = detail::integer(detail::require(jj, "dof", path), path + ".dof");
      const json& axes = detail::require(jj, "axes", path);
      if (!axes.is_array()) throw ParseError(path + ".axes: expected an array");
      for (std::size_t a = 0; a < axes.size(); ++a) j.axes.push_back(detail::vec3(axes[a], detail::idx(path + ".axes", a)));
      const json& limits = detail::require(jj, "angle_limits", path);
      if (!limits.is_array()) throw ParseError(path + ".angle_limits: expected an array");
      for (std::size_t a = 0; a < limits.size(); ++a) {
        const std::string lp = detail::idx(path + ".angle_limits", a);
        if (!limits[a].is_array() || limits[a].size() != 2) throw ParseError(lp + ": expected [lo, hi]");
        j.angle_limits.emplace_back(detail::number(limits[a][0], lp), detail::number(limits[a][1], lp));
      }
      const json& gear = detail::require(jj, "gear", path);
      if (!gear.is_array()) throw ParseError(path + ".gear: expected an array");
      for (std::size_t a = 0; a < gear.size(); ++a) j.gear.push_back(detail::number(gear[a], detail::idx(path + ".gear", a)));
      spec.morphology.joints.push_back(std::move(j));
    }

    const json& task = detail::require(doc, "task", "");
    spec.reward_kind = detail::parse_reward(detail::require(task, "reward", "task").get<std::string>(), "task.reward");
    if (task.contains("target_direction")) spec.target_direction = detail::vec3(task.at("target_direction"), "task.target_direction");
    if (task.contains("effector_limb")) spec.effector_limb = detail::integer(task.at("effector_limb"), "task.effector_limb");
    if (task.contains("effector_offset")) spec.effector_offset = detail::vec3(task.at("effector_offset"), "task.effector_offset");
    if (task.contains("target_center")) spec.target_center = detail::vec3(task.at("target_center"), "task.target_center");
    if (task.contains("target_radius")) {
      const json& r = task.at("target_radius");
      if (!r.is_array() || r.size() != 2) throw ParseError("task.target_radius: expected [min, max]");
      spec.target_radius_min = detail::number(r[0], "task.target_radius");
      spec.target_radius_max = detail::number(r[1], "task.target_radius");
    }
    spec.v_ref = detail::optional_number(task, "v_ref", spec.v_ref, "task");
    spec.z_ref = detail::optional_number(task, "z_ref", spec.z_ref, "task");
    spec.reach_ref = detail::optional_number(task, "reach_ref", spec.reach_ref, "task");
    if (task.contains("episode_steps")) spec.episode_steps = detail::integer(task.at("episode_steps"), "task.episode_steps");
    spec.dt_control = detail::optional_number(task, "dt_control", spec.dt_control, "task");
    if (task.contains("physics_substeps")) spec.physics_substeps = detail::integer(task.at("physics_substeps"), "task.physics_substeps");
    if (task.contains("physics")) {
      const json& p = task.at("physics");
      PhysicsParams& pp = spec.physics;
      pp.gravity = detail::optional_number(p, "gravity", pp.gravity, "task.physics");
      pp.joint_damping = detail::optional_number(p, "joint_damping", pp.joint_damping, "task.physics");
      if (p.contains("contact")) {
        const json& c = p.at("contact");
        pp.contact.stiffness = detail::optional_number(c, "stiffness", pp.contact.stiffness, "task.physics.contact");
        pp.contact.damping = detail::optional_number(c, "damping", pp.contact.damping, "task.physics.contact");
        pp.contact.tangential = detail::optional_number(c, "tangential", pp.contact.tangential, "task.physics.contact");
      }
      if (p.contains("joint_limit")) {
        const json& c = p.at("joint_limit");
        pp.limits.stiffness = detail::optional_number(c, "stiffness", pp.limits.stiffness, "task.physics.joint_limit");
        pp.limits.damping = detail::optional_number(c, "damping", pp.limits.damping, "task.physics.joint_limit");
      }
      if (p.contains("integrator")) pp.integrator = detail::parse_integrator(p.at("integrator").get<std::string>(), "task.physics.integrator");
    }
    if (task.contains("init")) {
      const json& i = task.at("init");
      spec.init.joint_noise = detail::optional_number(i, "joint_noise", spec.init.joint_noise, "task.init");
      spec.init.velocity_noise = detail::optional_number(i, "velocity_noise", spec.init.velocity_noise, "task.init");
      spec.init.uniform_joint_angles = i.value("uniform_joint_angles", false);
    }

    if (doc.contains("sensors")) {
      const json& sensors = doc.at("sensors");
      if (!sensors.is_array()) throw ParseError("sensors: expected an array");
      for (std::size_t s = 0; s < sensors.size(); ++s) {
        const json& js = sensors[s];
        const std::string path = detail::idx("sensors", s);
        SensorSpec sensor;
        sensor.name = js.value("name", "sensor" + std::to_string(s));
        sensor.kind = detail::parse_sensor_kind(detail::require(js, "type", path).get<std::string>(), path + ".type");
        const std::string tag = detail::require(js, "tag", path).get<std::string>();
        if (tag == "invariant") {
          sensor.tag = SensorTag::invariant;
        } else if (tag == "equivariant") {
          sensor.tag = SensorTag::equivariant;
        } else {
          throw ParseError(path + ".tag: expected invariant or equivariant");
        }
        if (js.contains("limb")) sensor.limb = detail::integer(js.at("limb"), path + ".limb");
        if (js.contains("point")) sensor.point = detail::integer(js.at("point"), path + ".point");
        spec.sensors.push_back(std::move(sensor));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected value type: ") + e.what());
  }
  validate(spec);
  return spec;
}

// Serializes a task back into the document format accepted by load_morphology.
inline nlohmann::json task_to_json(const TaskSpec& spec) {
  using detail::json;
  using detail::to_json;
  json doc;
  doc["name"] = spec.name;
  doc["root"] = {{"dof", spec.morphology.root.dof}};
  json limbs = json::array();
  for (const auto& l : spec.morphology.limbs) {
    json pts = json::array();
    for (const auto& p : l.contact_points) pts.push_back(to_json(p));
    limbs.push_back({{"name", l.name},
                     {"mass", l.mass},
                     {"inertia", to_json(l.inertia)},
                     {"com_offset", to_json(l.com_offset)},
                     {"joint_anchor", to_json(l.joint_anchor)},
                     {"contact_points", pts}});
  }
  doc["limbs"] = limbs;
  json joints = json::array();
  for (const auto& j : spec.morphology.joints) {
    json axes = json::array();
    for (const auto& a : j.axes) axes.push_back(to_json(a));
    json limits = json::array();
    for (const auto& [lo, hi] : j.angle_limits) limits.push_back(json::array({lo, hi}));
    joints.push_back({{"name", j.name},
                      {"parent", j.parent},
                      {"child", j.child},
                      {"dof", j.dof},
                      {"axes", axes},
                      {"angle_limits", limits},
                      {"gear", j.gear}});
  }
  doc["joints"] = joints;
  const PhysicsParams& p = spec.physics;
  json task = {{"reward", to_string(spec.reward_kind)},
               {"target_direction", to_json(spec.target_direction)},
               {"v_ref", spec.v_ref},
               {"z_ref", spec.z_ref},
               {"reach_ref", spec.reach_ref},
               {"episode_steps", spec.episode_steps},
               {"dt_control", spec.dt_control},
               {"physics_substeps", spec.physics_substeps},
               {"physics",
                {{"gravity", p.gravity},
                 {"joint_damping", p.joint_damping},
                 {"contact", {{"stiffness", p.contact.stiffness}, {"damping", p.contact.damping}, {"tangential", p.contact.tangential}}},
                 {"joint_limit", {{"stiffness", p.limits.stiffness}, {"damping", p.limits.damping}}},
                 {"integrator", p.integrator == Integrator::rk4 ? "rk4" : "semi_implicit_euler"}}},
               {"init",
                {{"joint_noise", spec.init.joint_noise},
                 {"velocity_noise", spec.init.velocity_noise},
                 {"uniform_joint_angles", spec.init.uniform_joint_angles}}}};
  if (spec.is_reach()) {
    task["effector_limb"] = spec.effector_limb;
    task["effector_offset"] = to_json(spec.effector_offset);
    task["target_center"] = to_json(spec.target_center);
    task["target_radius"] = json::array({spec.target_radius_min, spec.target_radius_max});
  }
  doc["task"] = task;
  json sensors = json::array();
  for (const auto& s : spec.sensors) {
    json js = {{"name", s.name}, {"type", to_string(s.kind)}, {"tag", to_string(s.tag)}};
    if (s.kind == SensorKind::touch) {
      js["limb"] = s.limb;
      js["point"] = s.point;
    }
    sensors.push_back(js);
  }
  doc["sensors"] = sensors;
  return doc;
}

// Kinematic block of a representation, without task and sensor features.
// Limb: R_1 columns, omega_1, {p_i, v_i}, and three axes per 3-DoF joint and
// two per 2-DoF joint. Joint: one (q, qdot) pair per generalized coordinate.
inline int kinematic_feature_dimension(const TaskSpec& spec, Representation repr) {
  const DofCounts c = spec.morphology.counts();
  if (repr == Representation::joint) return 2 * c.d;
  return 3 * 3 + 3 + 3 * c.n + 3 * c.n + 3 * (2 * c.n2 + 3 * c.n3);
}

// Length of the StateVector the feature builders produce for `repr`.
inline int feature_dimension(const TaskSpec& spec, Representation repr) {
  constexpr int kTaskFeature = 3;
  return kinematic_feature_dimension(spec, repr) + kTaskFeature + spec.sensor_dimension();
}

// Registry of the task documents shipped under tasks/.
inline const std::map<std::string, TaskSpec>& builtin_tasks() {
  static const std::map<std::string, TaskSpec> registry = [] {
    std::map<std::string, TaskSpec> r;
    for (const auto& [name, doc] : detail::kBuiltinTaskDocuments) {
      TaskSpec spec = load_morphology(doc);
      if (spec.name.empty()) spec.name = std::string(name);
      r.emplace(std::string(name), std::move(spec));
    }
    return r;
  }();
  return registry;
}

inline const TaskSpec& builtin_task(const std::string& name) {
  const auto& r = builtin_tasks();
  auto it = r.find(name);
  if (it == r.end()) throw ConfigError("unknown task '" + name + "'");
  return it->second;
}

// The seven tasks covered by the acceptance gates; the rest of the registry is
// simplified and optional.
inline const std::vector<std::string>& core_task_names() {
  static const std::vector<std::string> names = {"cheetah2d_run", "cheetah3d_run", "hopper2d_hop", "hopper3d_hop",
                                                 "walker2d_run", "walker3d_run", "reacher_hard"};
  return names;
}

}  // namespace eucaug
