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

// Static 2D world, LiDAR raycasting, capsule footprint and holonomic
// kinematics. All functions are pure.

#ifndef SHARED_CONTROL_GEOMETRY_HPP_
#define SHARED_CONTROL_GEOMETRY_HPP_

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

namespace shared_control {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Rotates v counter-clockwise by angle.
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Wraps to (-pi, pi].
double normalize_angle(double angle);

struct Pose2D {
  Vec2 position;
  double yaw = 0.0;

  bool operator==(const Pose2D&) const = default;
};

// Body-frame command: vx forward, vy left, omega counter-clockwise.
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  bool operator==(const VelocityCommand&) const = default;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

struct AxisBox {
  Vec2 center;
  Vec2 half_extents;
};

// A wall piece: the rectangle swept by segment a-b with the given total
// thickness (flat ends). Zero thickness is a line segment.
struct Segment {
  Vec2 a;
  Vec2 b;
  double thickness = 0.0;
};

using ObstacleShape = std::variant<Circle, AxisBox, Segment>;

// Square arena [-h, h]^2 whose boundary acts as a wall.
struct WorldSpec {
  double arena_half_extent = 5.0;
  std::vector<ObstacleShape> obstacles;
};

struct LidarSpec {
  int n_rays = 36;
  double min_range = 0.3;
  double max_range = 2.5;
  double angle_offset = 0.0;
};

// Ray i points at body angle angle_offset + 2*pi*i/n (counter-clockwise).
struct LidarScan {
  std::vector<double> ranges;
  double angle_offset = 0.0;

  std::size_t size() const { return ranges.size(); }
  double angle(std::size_t i) const {
    return angle_offset +
           2.0 * std::numbers::pi * static_cast<double>(i) /
               static_cast<double>(ranges.size());
  }
};

// Stadium footprint: a segment of length 2*segment_half_length along body x,
// centered on the robot, inflated by the collision and critical radii.
struct CollisionCapsule {
  double radius_col = 0.325;
  double radius_crit = 0.525;
  double segment_half_length = 0.15;
};

struct CapsuleDistance {
  double d_col = 0.0;
  double d_crit = 0.0;
};

enum class Zone { kFree, kCritical, kCollision };

// Per-ray thresholds for one LiDAR layout; cached by callers that step often.
struct RayThresholds {
  std::vector<double> d_col;
  std::vector<double> d_crit;
};

// Validates shape and world invariants; throws std::invalid_argument.
void validate(const ObstacleShape& shape);
void validate(const WorldSpec& world);
void validate(const LidarSpec& spec);
void validate(const CollisionCapsule& capsule);

double ray_angle(const LidarSpec& spec, int i);

LidarScan raycast(const WorldSpec& world, const Pose2D& pose,
                  const LidarSpec& spec);

// Distance from the robot center to the capsule boundary along body_angle.
CapsuleDistance capsule_threshold(const CollisionCapsule& capsule,
                                  double body_angle);

RayThresholds ray_thresholds(const CollisionCapsule& capsule,
                             const LidarSpec& spec);

std::vector<Zone> classify_proximity(const LidarScan& scan,
                                     const CollisionCapsule& capsule);
std::vector<Zone> classify_proximity(const LidarScan& scan,
                                     const RayThresholds& thresholds);

Pose2D integrate_kinematics(const Pose2D& pose, const VelocityCommand& cmd,
                            double dt);

// Signed distance from a point to the nearest obstacle surface or arena
// wall; negative inside an obstacle or outside the arena.
double clearance(const WorldSpec& world, const Vec2& point);

}  // namespace shared_control

#endif  // SHARED_CONTROL_GEOMETRY_HPP_
