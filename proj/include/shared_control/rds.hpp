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

// Reactive Driving Support baseline: the planar velocity closest to the
// user's command among velocities that do not cross any ray's collision
// threshold within the horizon tau. Angular velocity steers toward the
// user's direction.

#ifndef SHARED_CONTROL_RDS_HPP_
#define SHARED_CONTROL_RDS_HPP_

#include <vector>

#include "shared_control/geometry.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

// n . v <= offset, n a unit vector in the body frame.
struct SafetyConstraint {
  Vec2 normal;
  double offset = 0.0;
};

inline constexpr double kRdsDefaultTau = 2.0;
inline constexpr int kRdsMaxIterations = 200;
inline constexpr double kRdsTolerance = 1e-6;

// One constraint per ray closer than its d_crit: the approach speed toward
// the hit point is limited to (d - d_col) / tau. Throws
// std::invalid_argument unless tau > 0.
std::vector<SafetyConstraint> build_constraints(const LidarScan& scan,
                                                const CollisionCapsule& capsule,
                                                double tau);
std::vector<SafetyConstraint> build_constraints(const LidarScan& scan,
                                                const RayThresholds& thresholds,
                                                double tau);

struct ProjectionResult {
  Vec2 velocity;
  bool feasible = true;
  int iterations = 0;
  double max_violation = 0.0;
  bool refined = false;  // settled by the exact clipped-disk projection
};

// Euclidean projection of `point` onto the intersection of the half-planes and
// the disk of radius `radius`. Dykstra's alternating projection runs first;
// a result that fails the optimality check is replaced by the exact
// projection onto the clipped disk. Normals must be unit vectors.
ProjectionResult project_velocity(Vec2 point,
                                  const std::vector<SafetyConstraint>& constraints,
                                  double radius);

// Linear part: projection of v_max_lin * u; zero when the set is empty.
// Angular part: clamp(heading_gain * atan2(uy, ux), +-omega_max), zero for
// zero input.
VelocityCommand solve_rds(const UserInput& u,
                          const std::vector<SafetyConstraint>& constraints,
                          double v_max_lin, double omega_max,
                          double heading_gain = 1.0);

}  // namespace shared_control

#endif  // SHARED_CONTROL_RDS_HPP_
