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

namespace eucaug {

// Penalty ground contact against the plane z = 0. Normal force per contact
// point is max(0, -k_n z - c_n zdot) while the point is below the plane, and
// the tangential force is -c_t times the in-plane point velocity.
struct ContactModel {
  double stiffness = 2.0e4;   // N/m
  double damping = 300.0;     // N s/m
  double tangential = 100.0;  // N s/m

  static ContactModel disabled() { return {0.0, 0.0, 0.0}; }
  bool enabled() const { return stiffness > 0.0 || damping > 0.0 || tangential > 0.0; }
};

// Stiff penalty spring pushing joint coordinates back inside their limits.
struct JointLimitModel {
  double stiffness = 500.0;  // N m / rad
  double damping = 1.0;      // N m s / rad
};

enum class Integrator { rk4, semi_implicit_euler };

struct PhysicsParams {
  double gravity = 9.81;      // m/s^2 along -z
  double joint_damping = 0.5;  // N m s / rad on every non-root DoF
  ContactModel contact;
  JointLimitModel limits;
  Integrator integrator = Integrator::rk4;
};

}  // namespace eucaug
