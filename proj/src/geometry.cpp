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

#include "shared_control/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "shared_control/simd/kernels.hpp"

namespace shared_control {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Slab test of a ray against an axis-aligned box [lo, hi] in the ray's
// frame. Returns the entry distance, 0 when the origin is inside, or +inf.
double ray_slab(const Vec2& origin, const Vec2& dir, const Vec2& lo,
                const Vec2& hi) {
  double t_min = -kInf;
  double t_max = kInf;
  const double p[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double l[2] = {lo.x, lo.y};
  const double h[2] = {hi.x, hi.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (p[k] < l[k] || p[k] > h[k]) return kInf;
      continue;
    }
    double t1 = (l[k] - p[k]) / d[k];
    double t2 = (h[k] - p[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    t_min = std::max(t_min, t1);
    t_max = std::min(t_max, t2);
  }
  if (t_max < t_min || t_max < 0.0) return kInf;
  return std::max(t_min, 0.0);
}

double ray_box(const Vec2& origin, const Vec2& dir, const AxisBox& box) {
  return ray_slab(origin, dir, box.center - box.half_extents,
                  box.center + box.half_extents);
}

double ray_segment(const Vec2& origin, const Vec2& dir, const Segment& seg) {
  const Vec2 axis = seg.b - seg.a;
  const double length = axis.norm();
  if (length == 0.0) return kInf;
  const Vec2 u = axis * (1.0 / length);
  const Vec2 v{-u.y, u.x};
  const Vec2 rel = origin - seg.a;
  const Vec2 local_origin{rel.dot(u), rel.dot(v)};
  const Vec2 local_dir{dir.dot(u), dir.dot(v)};
  const double half = 0.5 * seg.thickness;
  return ray_slab(local_origin, local_dir, {0.0, -half}, {length, half});
}

// Distance to leave the arena square from an interior origin.
double ray_arena(const Vec2& origin, const Vec2& dir, double half_extent) {
  if (std::abs(origin.x) > half_extent || std::abs(origin.y) > half_extent) {
    return 0.0;
  }
  double t = kInf;
  if (dir.x > 0.0) t = std::min(t, (half_extent - origin.x) / dir.x);
  if (dir.x < 0.0) t = std::min(t, (-half_extent - origin.x) / dir.x);
  if (dir.y > 0.0) t = std::min(t, (half_extent - origin.y) / dir.y);
  if (dir.y < 0.0) t = std::min(t, (-half_extent - origin.y) / dir.y);
  return t;
}

double box_sdf(const Vec2& p, const Vec2& center, const Vec2& half) {
  const double qx = std::abs(p.x - center.x) - half.x;
  const double qy = std::abs(p.y - center.y) - half.y;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0);
}

double shape_sdf(const ObstacleShape& shape, const Vec2& p) {
  return std::visit(
      Overloaded{
          [&](const Circle& c) { return (p - c.center).norm() - c.radius; },
          [&](const AxisBox& b) {
            return box_sdf(p, b.center, b.half_extents);
          },
          [&](const Segment& s) {
            const Vec2 axis = s.b - s.a;
            const double length = axis.norm();
            const Vec2 u = length > 0.0 ? axis * (1.0 / length) : Vec2{1, 0};
            const Vec2 v{-u.y, u.x};
            const Vec2 rel = p - s.a;
            const Vec2 local{rel.dot(u), rel.dot(v)};
            return box_sdf(local, {0.5 * length, 0.0},
                           {0.5 * length, 0.5 * s.thickness});
          }},
      shape);
}

void check_finite(const Vec2& v, const char* what) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

void validate(const ObstacleShape& shape) {
  std::visit(Overloaded{[](const Circle& c) {
                          check_finite(c.center, "circle center");
                          if (!(c.radius > 0.0)) {
                            throw std::invalid_argument("circle radius must be > 0");
                          }
                        },
                        [](const AxisBox& b) {
                          check_finite(b.center, "box center");
                          if (!(b.half_extents.x > 0.0 && b.half_extents.y > 0.0)) {
                            throw std::invalid_argument("box half extents must be > 0");
                          }
                        },
                        [](const Segment& s) {
                          check_finite(s.a, "segment endpoint");
                          check_finite(s.b, "segment endpoint");
                          if (!(s.thickness >= 0.0)) {
                            throw std::invalid_argument("segment thickness must be >= 0");
                          }
                          if (s.a == s.b) {
                            throw std::invalid_argument("segment endpoints must differ");
                          }
                        }},
             shape);
}

void validate(const WorldSpec& world) {
  if (!(world.arena_half_extent > 0.0)) {
    throw std::invalid_argument("arena_half_extent must be > 0");
  }
  const double h = world.arena_half_extent + 1e-9;
  auto inside = [h](const Vec2& p) {
    return std::abs(p.x) <= h && std::abs(p.y) <= h;
  };
  for (const auto& shape : world.obstacles) {
    validate(shape);
    const bool ok = std::visit(
        Overloaded{[&](const Circle& c) {
                     return inside(c.center + Vec2{c.radius, c.radius}) &&
                            inside(c.center - Vec2{c.radius, c.radius});
                   },
                   [&](const AxisBox& b) {
                     return inside(b.center + b.half_extents) &&
                            inside(b.center - b.half_extents);
                   },
                   [&](const Segment& s) { return inside(s.a) && inside(s.b); }},
        shape);
    if (!ok) throw std::invalid_argument("obstacle extends outside the arena");
  }
}

void validate(const LidarSpec& spec) {
  if (spec.n_rays != 36 && spec.n_rays != 360) {
    throw std::invalid_argument("lidar n_rays must be 36 or 360");
  }
  if (!(spec.min_range > 0.0 && spec.min_range < spec.max_range)) {
    throw std::invalid_argument("lidar requires 0 < min_range < max_range");
  }
}

void validate(const CollisionCapsule& capsule) {
  if (!(capsule.radius_col > 0.0 && capsule.radius_crit > capsule.radius_col)) {
    throw std::invalid_argument("capsule requires radius_crit > radius_col > 0");
  }
  if (!(capsule.segment_half_length >= 0.0)) {
    throw std::invalid_argument("capsule segment_half_length must be >= 0");
  }
}

double ray_angle(const LidarSpec& spec, int i) {
  return spec.angle_offset + 2.0 * kPi * i / spec.n_rays;
}

LidarScan raycast(const WorldSpec& world, const Pose2D& pose,
                  const LidarSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.n_rays);
  std::vector<double> dir_x(n);
  std::vector<double> dir_y(n);
  LidarScan scan;
  scan.angle_offset = spec.angle_offset;
  scan.ranges.assign(n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pose.yaw + ray_angle(spec, static_cast<int>(i));
    dir_x[i] = std::cos(a);
    dir_y[i] = std::sin(a);
  }
  const simd::KernelTable& kernels = simd::active_kernels();
  const Vec2 origin = pose.position;
  for (const auto& shape : world.obstacles) {
    if (const auto* circle = std::get_if<Circle>(&shape)) {
      const Vec2 rel = circle->center - origin;
      kernels.ray_circle(dir_x.data(), dir_y.data(), n, rel.x, rel.y,
                         circle->radius, scan.ranges.data());
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 dir{dir_x[i], dir_y[i]};
      const double t = std::holds_alternative<AxisBox>(shape)
                           ? ray_box(origin, dir, std::get<AxisBox>(shape))
                           : ray_segment(origin, dir, std::get<Segment>(shape));
      scan.ranges[i] = std::min(scan.ranges[i], t);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double wall =
        ray_arena(origin, {dir_x[i], dir_y[i]}, world.arena_half_extent);
    scan.ranges[i] = std::clamp(std::min(scan.ranges[i], wall),
                                spec.min_range, spec.max_range);
  }
  return scan;
}

CapsuleDistance capsule_threshold(const CollisionCapsule& capsule,
                                  double body_angle) {
  const double c = std::abs(std::cos(body_angle));
  const double s = std::abs(std::sin(body_angle));
  const double half = capsule.segment_half_length;
  // Exit distance of a ray from the center through a stadium of radius r.
  // Folded into the first quadrant, the ray leaves either through the flat
  // side (y = r) or through the end cap centered at (half, 0).
  auto exit = [&](double r) {
    if (s > 0.0) {
      const double t_side = r / s;
      if (t_side * c <= half) return t_side;
    }
    const double b = c * half;
    return b + std::sqrt(b * b - (half * half - r * r));
  };
  return {exit(capsule.radius_col), exit(capsule.radius_crit)};
}

RayThresholds ray_thresholds(const CollisionCapsule& capsule,
                             const LidarSpec& spec) {
  RayThresholds out;
  out.d_col.resize(spec.n_rays);
  out.d_crit.resize(spec.n_rays);
  for (int i = 0; i < spec.n_rays; ++i) {
    const CapsuleDistance d = capsule_threshold(capsule, ray_angle(spec, i));
    out.d_col[i] = d.d_col;
    out.d_crit[i] = d.d_crit;
  }
  return out;
}

std::vector<Zone> classify_proximity(const LidarScan& scan,
                                     const RayThresholds& thresholds) {
  std::vector<Zone> zones(scan.size(), Zone::kFree);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double d = scan.ranges[i];
    if (d < thresholds.d_col[i]) {
      zones[i] = Zone::kCollision;
    } else if (d < thresholds.d_crit[i]) {
      zones[i] = Zone::kCritical;
    }
  }
  return zones;
}

std::vector<Zone> classify_proximity(const LidarScan& scan,
                                     const CollisionCapsule& capsule) {
  RayThresholds thresholds;
  thresholds.d_col.resize(scan.size());
  thresholds.d_crit.resize(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const CapsuleDistance d = capsule_threshold(capsule, scan.angle(i));
    thresholds.d_col[i] = d.d_col;
    thresholds.d_crit[i] = d.d_crit;
  }
  return classify_proximity(scan, thresholds);
}

Pose2D integrate_kinematics(const Pose2D& pose, const VelocityCommand& cmd,
                            double dt) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  Pose2D next;
  next.position.x = pose.position.x + dt * (c * cmd.vx - s * cmd.vy);
  next.position.y = pose.position.y + dt * (s * cmd.vx + c * cmd.vy);
  next.yaw = normalize_angle(pose.yaw + dt * cmd.omega);
  return next;
}

double clearance(const WorldSpec& world, const Vec2& point) {
  const double h = world.arena_half_extent;
  double d = std::min(h - std::abs(point.x), h - std::abs(point.y));
  for (const auto& shape : world.obstacles) {
    d = std::min(d, shape_sdf(shape, point));
  }
  return d;
}

}  // namespace shared_control
