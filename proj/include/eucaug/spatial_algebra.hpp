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

// Plucker spatial vectors expressed in the world frame with the world origin
// as reference point. Motion vectors are [angular; linear], force vectors are
// [moment; force].

#include <Eigen/Dense>

#include "eucaug/spatial.hpp"

namespace eucaug::spatial_algebra {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Vec3 angular(const Vec6& v) { return v.head<3>(); }
inline Vec3 linear(const Vec6& v) { return v.tail<3>(); }

inline Vec6 make(const Vec3& top, const Vec3& bottom) {
  Vec6 v;
  v << top, bottom;
  return v;
}

// v x m (motion cross product).
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = angular(v);
  const Vec3 u = linear(v);
  return make(w.cross(angular(m)), w.cross(linear(m)) + u.cross(angular(m)));
}

// v x* f (force cross product).
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = angular(v);
  const Vec3 u = linear(v);
  return make(w.cross(angular(f)) + u.cross(linear(f)), w.cross(linear(f)));
}

// Velocity of the body-fixed point at `x` for spatial velocity v.
inline Vec3 point_velocity(const Vec6& v, const Vec3& x) { return linear(v) + angular(v).cross(x); }

// Spatial force of a point force f applied at x.
inline Vec6 point_force(const Vec3& x, const Vec3& f) { return make(x.cross(f), f); }

// Spatial inertia of a body with mass m, COM at c, rotational inertia Ic about
// the COM (all world frame).
inline Mat6 inertia(double m, const Vec3& c, const Mat3& Ic) {
  const Mat3 cx = skew(c);
  Mat6 out;
  out.topLeftCorner<3, 3>() = Ic + m * cx * cx.transpose();
  out.topRightCorner<3, 3>() = m * cx;
  out.bottomLeftCorner<3, 3>() = m * cx.transpose();
  out.bottomRightCorner<3, 3>() = m * Mat3::Identity();
  return out;
}

// Revolute motion subspace: rotation about unit axis u through point c.
inline Vec6 revolute(const Vec3& u, const Vec3& c) { return make(u, c.cross(u)); }

inline Vec6 prismatic(const Vec3& u) { return make(Vec3::Zero(), u); }

}  // namespace eucaug::spatial_algebra
