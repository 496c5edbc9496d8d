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

// Rotation and pose algebra. Gravity points along -z; rotations about z
// ("yaw") are the symmetry group the rest of the library is built around.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eucaug/errors.hpp"

namespace eucaug {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultGravity = 9.81;
// Euler extraction refuses |pitch| >= pi/2 - kGimbalMargin.
inline constexpr double kGimbalMargin = 1e-6;

// Unit vector along gravity.
inline Vec3 gravity_direction() { return Vec3(0.0, 0.0, -1.0); }

// Wraps an angle to [-pi, pi).
inline double wrap_angle(double angle) {
  double w = std::fmod(angle + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w - kPi;
}

// Smallest signed difference a - b on the circle, in [-pi, pi).
inline double angle_difference(double a, double b) { return wrap_angle(a - b); }

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

// Element of SO(3). Construction from a raw matrix is checked unless the
// caller explicitly opts out.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-10;

  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  static Rotation from_matrix(const Mat3& m) {
    Rotation r(m);
    if (!r.is_valid(kTolerance)) {
      throw std::invalid_argument("matrix is not a proper rotation");
    }
    return r;
  }

  // For matrices known to be rotations up to rounding (products of rotations).
  static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }

  // Rotation by `angle` radians about a unit axis (Rodrigues).
  static Rotation axis_angle(const Vec3& unit_axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Mat3 k = skew(unit_axis);
    return Rotation(Mat3::Identity() + s * k + (1.0 - c) * (k * k));
  }

  // exp([w]x): rotation by |w| about w / |w|.
  static Rotation exp(const Vec3& w) {
    const double theta = w.norm();
    if (theta == 0.0) return Rotation();
    return axis_angle(w / theta, theta);
  }

  const Mat3& matrix() const { return m_; }
  Vec3 column(int i) const { return m_.col(i); }

  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  Rotation inverse() const { return Rotation(m_.transpose()); }

  // max |R^T R - I| and |det R - 1|.
  double orthonormality_error() const {
    const double ortho = (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
    return std::max(ortho, std::abs(m_.determinant() - 1.0));
  }
  bool is_valid(double tol = kTolerance) const {
    return m_.allFinite() && orthonormality_error() <= tol;
  }

  // One Newton-Schulz step towards the nearest rotation. Commutes with
  // left multiplication by any rotation.
  Rotation reorthonormalized() const {
    return Rotation(0.5 * m_ * (3.0 * Mat3::Identity() - m_.transpose() * m_));
  }

  bool operator==(const Rotation& other) const { return m_ == other.m_; }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

// Intrinsic z-y-x angles: R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZYX {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 transform(const Vec3& local) const { return rotation * local + translation; }
  Pose operator*(const Pose& child) const {
    return Pose{rotation * child.rotation, transform(child.translation)};
  }
};

// R_alpha: rotation by alpha about the gravity axis.
inline Rotation yaw_rotation(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Mat3 m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return Rotation::from_matrix_unchecked(m);
}

inline Rotation pitch_rotation(double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  Mat3 m;
  m << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return Rotation::from_matrix_unchecked(m);
}

inline Rotation roll_rotation(double gamma) {
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  Mat3 m;
  m << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return Rotation::from_matrix_unchecked(m);
}

inline Vec3 rotate(const Rotation& r, const Vec3& v) { return r * v; }

inline Rotation rotation_from_euler(const EulerZYX& e) {
  return yaw_rotation(e.yaw) * pitch_rotation(e.pitch) * roll_rotation(e.roll);
}

// Never throws; at the singularity the yaw/roll split is arbitrary but the
// returned angles still reproduce the rotation.
inline EulerZYX euler_from_rotation_unchecked(const Rotation& r) {
  const Mat3& m = r.matrix();
  EulerZYX e;
  e.pitch = std::atan2(-m(2, 0), std::hypot(m(0, 0), m(1, 0)));
  e.yaw = wrap_angle(std::atan2(m(1, 0), m(0, 0)));
  e.roll = wrap_angle(std::atan2(m(2, 1), m(2, 2)));
  return e;
}

inline EulerZYX euler_from_rotation(const Rotation& r) {
  const EulerZYX e = euler_from_rotation_unchecked(r);
  if (std::abs(e.pitch) >= kPi / 2.0 - kGimbalMargin) {
    throw GimbalLock("pitch " + std::to_string(e.pitch) +
                     " is within the gimbal margin; use the rotation matrix");
  }
  return e;
}

}  // namespace eucaug
