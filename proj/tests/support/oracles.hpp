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

// Reference implementations used as test oracles. Each one is written
// without calling the library routine it checks.

#ifndef SHARED_CONTROL_TESTS_ORACLES_HPP_
#define SHARED_CONTROL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "shared_control/geometry.hpp"
#include "shared_control/network.hpp"
#include "shared_control/rds.hpp"
#include "shared_control/rng.hpp"

namespace shared_control::oracle {

// Point membership in one obstacle, from the shape definitions.
inline bool inside(const ObstacleShape& shape, double px, double py) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    const double dx = px - c->center.x;
    const double dy = py - c->center.y;
    return dx * dx + dy * dy <= c->radius * c->radius;
  }
  if (const auto* b = std::get_if<AxisBox>(&shape)) {
    return std::abs(px - b->center.x) <= b->half_extents.x &&
           std::abs(py - b->center.y) <= b->half_extents.y;
  }
  const auto& s = std::get<Segment>(shape);
  const double lx = s.b.x - s.a.x;
  const double ly = s.b.y - s.a.y;
  const double len = std::sqrt(lx * lx + ly * ly);
  const double ux = lx / len;
  const double uy = ly / len;
  const double along = (px - s.a.x) * ux + (py - s.a.y) * uy;
  const double across = -(px - s.a.x) * uy + (py - s.a.y) * ux;
  return along >= 0.0 && along <= len && std::abs(across) <= 0.5 * s.thickness;
}

inline bool blocked(const WorldSpec& world, double px, double py) {
  const double h = world.arena_half_extent;
  if (std::abs(px) >= h || std::abs(py) >= h) return true;
  for (const auto& shape : world.obstacles) {
    if (inside(shape, px, py)) return true;
  }
  return false;
}

// Signed distance to one obstacle, from the shape definitions.
inline double signed_distance(const ObstacleShape& shape, double px, double py) {
  const auto box = [](double qx, double qy, double hx, double hy) {
    const double dx = std::abs(qx) - hx;
    const double dy = std::abs(qy) - hy;
    return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0)) + std::min(std::max(dx, dy), 0.0);
  };
  if (const auto* c = std::get_if<Circle>(&shape)) {
    return std::hypot(px - c->center.x, py - c->center.y) - c->radius;
  }
  if (const auto* b = std::get_if<AxisBox>(&shape)) {
    return box(px - b->center.x, py - b->center.y, b->half_extents.x, b->half_extents.y);
  }
  const auto& s = std::get<Segment>(shape);
  const double lx = s.b.x - s.a.x;
  const double ly = s.b.y - s.a.y;
  const double len = std::sqrt(lx * lx + ly * ly);
  const double ux = lx / len;
  const double uy = ly / len;
  const double along = (px - s.a.x) * ux + (py - s.a.y) * uy;
  const double across = -(px - s.a.x) * uy + (py - s.a.y) * ux;
  return box(along - 0.5 * len, across, 0.5 * len, 0.5 * s.thickness);
}

inline double world_distance(const WorldSpec& world, double px, double py) {
  double d = world.arena_half_extent - std::max(std::abs(px), std::abs(py));
  for (const auto& shape : world.obstacles) d = std::min(d, signed_distance(shape, px, py));
  return d;
}

// Sphere tracing: each step advances by the distance to the nearest surface,
// so no obstacle can be stepped over however thin the ray's chord through it.
inline std::vector<double> marched_ranges(const WorldSpec& world, const Pose2D& pose,
                                          const LidarSpec& spec, double tol = 1e-10) {
  std::vector<double> out(spec.n_rays);
  for (int i = 0; i < spec.n_rays; ++i) {
    const double a = pose.yaw + spec.angle_offset + 2.0 * std::numbers::pi * i / spec.n_rays;
    const double dx = std::cos(a);
    const double dy = std::sin(a);
    double t = 0.0;
    double range = spec.max_range;
    for (int k = 0; k < 10'000'000 && t <= spec.max_range; ++k) {
      const double d = world_distance(world, pose.position.x + t * dx, pose.position.y + t * dy);
      if (d <= tol) {
        range = t;
        break;
      }
      t += d;
    }
    out[i] = std::clamp(range, spec.min_range, spec.max_range);
  }
  return out;
}

// Random world with circles, boxes and thick wall pieces, plus a pose at
// least `clear` away from every obstacle.
struct RandomScene {
  WorldSpec world;
  Pose2D pose;
};

inline RandomScene random_scene(Rng& rng, double clear = 0.4) {
  RandomScene scene;
  scene.world.arena_half_extent = rng.uniform(3.0, 6.0);
  const double h = scene.world.arena_half_extent;
  const int n = 3 + static_cast<int>(rng.below(6));
  for (int k = 0; k < n; ++k) {
    const Vec2 c{rng.uniform(-h + 0.5, h - 0.5), rng.uniform(-h + 0.5, h - 0.5)};
    switch (rng.below(3)) {
      case 0:
        scene.world.obstacles.push_back(Circle{c, rng.uniform(0.1, 0.8)});
        break;
      case 1:
        scene.world.obstacles.push_back(
            AxisBox{c, {rng.uniform(0.1, 0.8), rng.uniform(0.1, 0.8)}});
        break;
      default: {
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double len = rng.uniform(0.5, 2.0);
        const Vec2 d{std::cos(a) * len, std::sin(a) * len};
        scene.world.obstacles.push_back(Segment{c, c + d, rng.uniform(0.05, 0.3)});
      }
    }
  }
  for (;;) {
    const double x = rng.uniform(-h + clear, h - clear);
    const double y = rng.uniform(-h + clear, h - clear);
    bool ok = true;
    for (int k = 0; k < 32 && ok; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 32;
      for (double r = 0.0; r <= clear && ok; r += 0.02) {
        ok = !blocked(scene.world, x + r * std::cos(a), y + r * std::sin(a));
      }
    }
    if (ok) {
      scene.pose = {{x, y}, rng.uniform(-std::numbers::pi, std::numbers::pi)};
      return scene;
    }
  }
}

// Distance from the center to the boundary of the stadium of radius r along
// `angle`, found by bisection on point membership.
inline double capsule_boundary(double half_length, double r, double angle) {
  const auto in = [&](double t) {
    const double px = t * std::cos(angle);
    const double py = t * std::sin(angle);
    const double sx = std::clamp(px, -half_length, half_length);
    return (px - sx) * (px - sx) + py * py <= r * r;
  };
  double lo = 0.0;
  double hi = half_length + r + 1.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (in(mid) ? lo : hi) = mid;
  }
  return lo;
}

// A_t as a direct discounted sum of TD errors, stopping at episode ends.
struct GaeOracle {
  std::vector<double> advantages;
  std::vector<double> returns;
};

inline GaeOracle brute_force_gae(std::span<const double> rewards, std::span<const double> values,
                                 std::span<const std::uint8_t> dones,
                                 std::span<const double> bootstrap, int n_envs, int horizon,
                                 double gamma, double lambda) {
  GaeOracle out;
  out.advantages.assign(rewards.size(), 0.0);
  out.returns.assign(rewards.size(), 0.0);
  for (int e = 0; e < n_envs; ++e) {
    const auto at = [&](int t) { return static_cast<std::size_t>(e) * horizon + t; };
    const auto next_value = [&](int t) { return t + 1 < horizon ? values[at(t + 1)] : bootstrap[e]; };
    for (int t = 0; t < horizon; ++t) {
      double sum = 0.0;
      double weight = 1.0;
      for (int k = t; k < horizon; ++k) {
        const double live = dones[at(k)] ? 0.0 : 1.0;
        const double delta = rewards[at(k)] + gamma * next_value(k) * live - values[at(k)];
        sum += weight * delta;
        if (dones[at(k)]) break;
        weight *= gamma * lambda;
      }
      out.advantages[at(t)] = sum;
      out.returns[at(t)] = sum + values[at(t)];
    }
  }
  return out;
}

// Best feasible point of a square grid over the disk; nullopt when no grid
// point satisfies every constraint.
struct GridOptimum {
  Vec2 point;
  double distance = 0.0;
  double cell = 0.0;
};

inline std::optional<GridOptimum> grid_projection(Vec2 target,
                                                  const std::vector<SafetyConstraint>& constraints,
                                                  double radius, int cells = 200) {
  const double cell = 2.0 * radius / cells;
  std::optional<GridOptimum> best;
  for (int i = 0; i <= cells; ++i) {
    for (int j = 0; j <= cells; ++j) {
      const Vec2 p{-radius + i * cell, -radius + j * cell};
      if (p.x * p.x + p.y * p.y > radius * radius) continue;
      bool ok = true;
      for (const auto& c : constraints) {
        if (c.normal.x * p.x + c.normal.y * p.y > c.offset) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double d = std::hypot(p.x - target.x, p.y - target.y);
      if (!best || d < best->distance) best = GridOptimum{p, d, cell};
    }
  }
  return best;
}

// Exact projection onto {|p| <= radius, n_i . p <= b_i} by enumerating every
// candidate optimum: the target, its projection onto each line and the circle,
// and the pairwise line/line and line/circle intersections. The nearest
// feasible candidate is the projection. nullopt when none is feasible.
inline std::optional<Vec2> enumerated_projection(Vec2 target,
                                                 const std::vector<SafetyConstraint>& constraints,
                                                 double radius, double tol = 1e-9) {
  std::vector<Vec2> candidates = {target};
  const double tn = std::hypot(target.x, target.y);
  if (tn > 0.0) candidates.push_back({target.x * radius / tn, target.y * radius / tn});
  for (const auto& c : constraints) {
    const double nn = c.normal.x * c.normal.x + c.normal.y * c.normal.y;
    const double s = (c.normal.x * target.x + c.normal.y * target.y - c.offset) / nn;
    candidates.push_back({target.x - s * c.normal.x, target.y - s * c.normal.y});
    // Line/circle: foot of the origin plus a chord offset.
    const Vec2 foot{c.normal.x * c.offset / nn, c.normal.y * c.offset / nn};
    const double h2 = radius * radius - (foot.x * foot.x + foot.y * foot.y);
    if (h2 >= 0.0) {
      const double h = std::sqrt(h2 / nn);
      candidates.push_back({foot.x - h * c.normal.y, foot.y + h * c.normal.x});
      candidates.push_back({foot.x + h * c.normal.y, foot.y - h * c.normal.x});
    }
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    for (std::size_t j = i + 1; j < constraints.size(); ++j) {
      const auto& a = constraints[i];
      const auto& b = constraints[j];
      const double det = a.normal.x * b.normal.y - a.normal.y * b.normal.x;
      if (std::abs(det) < 1e-14) continue;
      candidates.push_back({(a.offset * b.normal.y - a.normal.y * b.offset) / det,
                            (a.normal.x * b.offset - a.offset * b.normal.x) / det});
    }
  }
  std::optional<Vec2> best;
  double best_d = 0.0;
  for (const Vec2& p : candidates) {
    if (std::hypot(p.x, p.y) > radius + tol) continue;
    bool ok = true;
    for (const auto& c : constraints) {
      if (c.normal.x * p.x + c.normal.y * p.y > c.offset + tol) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double d = std::hypot(p.x - target.x, p.y - target.y);
    if (!best || d < best_d) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

// Central differences of f over the listed coordinates of x.
template <typename F>
std::vector<double> finite_difference(F&& f, std::vector<double> x,
                                      std::span<const std::size_t> coords, double eps = 1e-6) {
  std::vector<double> out;
  out.reserve(coords.size());
  for (std::size_t i : coords) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    x[i] = saved;
    out.push_back((up - down) / (2.0 * eps));
  }
  return out;
}

// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(std::span<const double> a, std::span<const double> b,
                             double floor = 1e-8) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

}  // namespace shared_control::oracle

#endif  // SHARED_CONTROL_TESTS_ORACLES_HPP_
