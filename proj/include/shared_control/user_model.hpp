/*
 * Copyright 2026 The shared_control Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHARED_CONTROL_USER_MODEL_HPP_
#define SHARED_CONTROL_USER_MODEL_HPP_

#include <cmath>

#include "shared_control/geometry.hpp"

namespace shared_control {

// Joystick deflection in the body frame: +x forward, +y left. |u| <= 1.
struct UserInput {
  double ux = 0.0;
  double uy = 0.0;

  double norm() const { return std::hypot(ux, uy); }
  bool operator==(const UserInput&) const = default;
};

inline constexpr double kManualDeadzone = 0.05;

// Unit vector from the robot toward the target, expressed in the body frame.
// Returns (0, 0) when the robot sits on the target.
UserInput simulated_input(const Pose2D& pose, const Vec2& target);

// Rescales raw stick readings onto the unit disk; deflections shorter than
// the deadzone become (0, 0).
UserInput clamp_manual_input(double x, double y,
                             double deadzone = kManualDeadzone);

// |atan2(uy, ux)|: angle between the chair's facing and the intent
// direction. 0 for an idle stick.
inline double heading_angle(const UserInput& u) {
  if (u.ux == 0.0 && u.uy == 0.0) return 0.0;
  return std::abs(std::atan2(u.uy, u.ux));
}

}  // namespace shared_control

#endif  // SHARED_CONTROL_USER_MODEL_HPP_
