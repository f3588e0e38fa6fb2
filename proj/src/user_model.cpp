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

#include "shared_control/user_model.hpp"

namespace shared_control {

UserInput simulated_input(const Pose2D& pose, const Vec2& target) {
  const Vec2 delta = target - pose.position;
  const double distance = delta.norm();
  if (distance == 0.0 || !std::isfinite(distance)) return {};
  const Vec2 body = rotate(delta * (1.0 / distance), -pose.yaw);
  return {body.x, body.y};
}

UserInput clamp_manual_input(double x, double y, double deadzone) {
  if (!std::isfinite(x) || !std::isfinite(y)) return {};
  const double n = std::hypot(x, y);
  if (n < deadzone) return {};
  if (n > 1.0) return {x / n, y / n};
  return {x, y};
}

}  // namespace shared_control
