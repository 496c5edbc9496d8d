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

#include <random>

#include "eucaug/spatial.hpp"

namespace eucaug {
namespace {

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const Vec3 axis = Vec3(n(rng), n(rng), n(rng)).normalized();
  return Rotation::axis_angle(axis, u(rng));
}

TEST(YawRotation, ZeroIsIdentity) {
  EXPECT_EQ(yaw_rotation(0.0).matrix(), Mat3::Identity());
}

TEST(YawRotation, QuarterTurnMapsXToY) {
  const Vec3 v = yaw_rotation(kPi / 2.0) * Vec3(1.0, 0.0, 0.0);
  EXPECT_NEAR(v.x(), 0.0, 1e-15);
  EXPECT_NEAR(v.y(), 1.0, 1e-15);
  EXPECT_EQ(v.z(), 0.0);
}

TEST(YawRotation, CompositionAddsAngles) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const Mat3 product = yaw_rotation(a).matrix() * yaw_rotation(b).matrix();
    EXPECT_LT((product - yaw_rotation(wrap_angle(a + b)).matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(YawRotation, FixesGravityAxisExactly) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const Mat3 m = yaw_rotation(u(rng)).matrix();
    EXPECT_EQ(m.row(2), Eigen::RowVector3d(0.0, 0.0, 1.0));
    EXPECT_EQ(m.col(2), Vec3(0.0, 0.0, 1.0));
    EXPECT_EQ(yaw_rotation(u(rng)) * gravity_direction(), gravity_direction());
  }
}

TEST(Rotate, IdentityAndHalfTurn) {
  EXPECT_EQ(rotate(Rotation::identity(), Vec3(1, 2, 3)), Vec3(1, 2, 3));
  const Vec3 v = rotate(yaw_rotation(kPi), Vec3(1, 0, 0));
  EXPECT_NEAR(v.x(), -1.0, 1e-15);
  EXPECT_NEAR(v.y(), 0.0, 1e-15);
}

TEST(Rotate, PreservesNorm) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 v(n(rng), n(rng), n(rng));
    EXPECT_NEAR(rotate(r, v).norm(), v.norm(), 1e-12);
  }
}

TEST(Rotation, ProducedRotationsAreProper) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    EXPECT_TRUE(random_rotation(rng).is_valid());
    EXPECT_TRUE(yaw_rotation(u(rng)).is_valid());
    EXPECT_TRUE(rotation_from_euler({u(rng), u(rng) / 2.0, u(rng)}).is_valid());
    EXPECT_TRUE(Rotation::exp(Vec3(u(rng), u(rng), u(rng))).is_valid());
  }
}

TEST(Rotation, FromMatrixRejectsNonRotations) {
  EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), std::invalid_argument);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(Rotation::from_matrix(reflection), std::invalid_argument);
  EXPECT_NO_THROW(Rotation::from_matrix(yaw_rotation(0.4).matrix()));
}

TEST(Euler, IdentityIsZero) {
  const EulerZYX e = euler_from_rotation(Rotation::identity());
  EXPECT_EQ(e.yaw, 0.0);
  EXPECT_EQ(e.pitch, 0.0);
  EXPECT_EQ(e.roll, 0.0);
}

TEST(Euler, PureYawMatchesYawRotation) {
  EXPECT_LT((rotation_from_euler({0.3, 0.0, 0.0}).matrix() - yaw_rotation(0.3).matrix()).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Euler, RoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Rotation r = random_rotation(rng);
    const EulerZYX e = euler_from_rotation(r);
    EXPECT_GE(e.yaw, -kPi);
    EXPECT_LT(e.yaw, kPi);
    EXPECT_GE(e.roll, -kPi);
    EXPECT_LT(e.roll, kPi);
    EXPECT_LE(std::abs(e.pitch), kPi / 2.0);
    EXPECT_LT((rotation_from_euler(e).matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Euler, YawPremultiplicationShiftsOnlyYaw) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation(rng);
    const double alpha = u(rng);
    const EulerZYX before = euler_from_rotation(r);
    const EulerZYX after = euler_from_rotation(yaw_rotation(alpha) * r);
    EXPECT_NEAR(angle_difference(after.yaw, before.yaw + alpha), 0.0, 1e-9);
    EXPECT_NEAR(after.pitch, before.pitch, 1e-9);
    EXPECT_NEAR(angle_difference(after.roll, before.roll), 0.0, 1e-9);
  }
}

TEST(Euler, GimbalLockIsReported) {
  EXPECT_THROW(euler_from_rotation(pitch_rotation(kPi / 2.0)), GimbalLock);
  EXPECT_THROW(euler_from_rotation(pitch_rotation(-kPi / 2.0 + 1e-7)), GimbalLock);
  EXPECT_NO_THROW(euler_from_rotation(pitch_rotation(kPi / 2.0 - 1e-3)));
}

TEST(WrapAngle, RangeAndIdempotence) {
  EXPECT_EQ(wrap_angle(kPi), -kPi);
  EXPECT_EQ(wrap_angle(-kPi), -kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(u(rng));
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_EQ(wrap_angle(w), w);
  }
}

TEST(Reorthonormalize, RemovesDrift) {
  Mat3 m = yaw_rotation(0.7).matrix() * pitch_rotation(0.2).matrix();
  m(0, 1) += 1e-7;
  const Rotation drifted = Rotation::from_matrix_unchecked(m);
  EXPECT_GT(drifted.orthonormality_error(), 1e-8);
  EXPECT_LT(drifted.reorthonormalized().orthonormality_error(), 1e-13);
}

}  // namespace
}  // namespace eucaug
