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

#include "shared_control/rds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace shared_control {
namespace {

Vec2 project_half_plane(Vec2 p, const SafetyConstraint& c) {
  const double excess = c.normal.dot(p) - c.offset;
  return excess > 0.0 ? p - c.normal * excess : p;
}

Vec2 project_disk(Vec2 p, double radius) {
  const double n = p.norm();
  return n > radius ? p * (radius / n) : p;
}

double violation(Vec2 p, const std::vector<SafetyConstraint>& constraints,
                 double radius) {
  double worst = std::max(0.0, p.norm() - radius);
  for (const SafetyConstraint& c : constraints) {
    worst = std::max(worst, c.normal.dot(p) - c.offset);
  }
  return worst;
}


double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// First-order optimality of x for the projection of `target`: target - x must
// lie in the cone of the normals active at x.
bool is_optimal(Vec2 x, Vec2 target, const std::vector<SafetyConstraint>& constraints,
                double radius) {
  constexpr double kActive = 1e-7;
  constexpr double kCone = 1e-7;
  const Vec2 d = target - x;
  const double dn = d.norm();
  if (dn <= kRdsTolerance) return true;
  std::vector<Vec2> normals;
  if (x.norm() >= radius - kActive) normals.push_back(x * (1.0 / x.norm()));
  for (const SafetyConstraint& c : constraints) {
    if (c.normal.dot(x) >= c.offset - kActive) normals.push_back(c.normal * (1.0 / c.normal.norm()));
  }
  const Vec2 u = d * (1.0 / dn);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (std::abs(cross(normals[i], u)) <= kCone && normals[i].dot(u) > 0.0) return true;
    for (std::size_t j = i + 1; j < normals.size(); ++j) {
      const double det = cross(normals[i], normals[j]);
      if (std::abs(det) < 1e-12) continue;
      const double a = cross(u, normals[j]) / det;
      const double b = cross(normals[i], u) / det;
      if (a >= -kCone && b >= -kCone) return true;
    }
  }
  return false;
}

// Boundary piece of a disk clipped by half-planes: a chord segment, or a
// counter-clockwise arc of the speed disk starting at angle a0.
struct Edge {
  Vec2 a;
  Vec2 b;
  bool arc = false;
  double a0 = 0.0;
  double sweep = 0.0;
};

Vec2 on_circle(double radius, double angle) {
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

Edge arc_edge(double radius, double a0, double sweep) {
  return {on_circle(radius, a0), on_circle(radius, a0 + sweep), true, a0, sweep};
}

// Clips a closed boundary by n.p <= b. Returns an empty list when nothing
// remains.
std::vector<Edge> clip(const std::vector<Edge>& boundary, const SafetyConstraint& c,
                       double radius) {
  constexpr double kEps = 1e-12;
  const double nn = c.normal.norm();
  const Vec2 n = c.normal * (1.0 / nn);
  const double b = c.offset / nn;
  const auto f = [&](Vec2 p) { return n.dot(p) - b; };

  std::vector<Edge> kept;
  for (const Edge& e : boundary) {
    if (!e.arc) {
      const double fa = f(e.a);
      const double fb = f(e.b);
      if (fa <= kEps && fb <= kEps) {
        kept.push_back(e);
      } else if (fa <= kEps || fb <= kEps) {
        const Vec2 q = e.a + (e.b - e.a) * (fa / (fa - fb));
        kept.push_back(fa <= kEps ? Edge{e.a, q} : Edge{q, e.b});
      }
      continue;
    }
    std::vector<double> cuts = {0.0};
    if (std::abs(b) < radius) {
      const double base = std::atan2(n.y, n.x);
      const double half = std::acos(b / radius);
      for (double phi : {base - half, base + half}) {
        double rel = std::fmod(phi - e.a0, 2.0 * std::numbers::pi);
        if (rel < 0.0) rel += 2.0 * std::numbers::pi;
        if (rel > 0.0 && rel < e.sweep) cuts.push_back(rel);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(e.sweep);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double mid = e.a0 + 0.5 * (cuts[k] + cuts[k + 1]);
      if (f(on_circle(radius, mid)) <= kEps) {
        Edge piece = arc_edge(radius, e.a0 + cuts[k], cuts[k + 1] - cuts[k]);
        // Keep exact endpoints where the arc was not cut.
        if (k == 0) piece.a = e.a;
        if (k + 2 == cuts.size()) piece.b = e.b;
        kept.push_back(piece);
      }
    }
  }
  // Close the gap left by the removed part with a chord along the line.
  std::vector<Edge> out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.push_back(kept[k]);
    const Vec2 next = kept[(k + 1) % kept.size()].a;
    if ((kept[k].b - next).norm() > 1e-12) out.push_back(Edge{kept[k].b, next});
  }
  return out;
}

Vec2 nearest_on_edge(const Edge& e, Vec2 p, double radius) {
  if (!e.arc) {
    const Vec2 ab = e.b - e.a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return e.a;
    return e.a + ab * std::clamp((p - e.a).dot(ab) / len2, 0.0, 1.0);
  }
  if (p.norm() > 0.0) {
    double rel = std::fmod(std::atan2(p.y, p.x) - e.a0, 2.0 * std::numbers::pi);
    if (rel < 0.0) rel += 2.0 * std::numbers::pi;
    if (rel <= e.sweep) return p * (radius / p.norm());
  }
  return (e.a - p).norm() <= (e.b - p).norm() ? e.a : e.b;
}

// Exact projection: clip the disk by every half-plane, then take the nearest
// boundary point unless the target is already inside.
std::optional<Vec2> exact_projection(Vec2 target,
                                     const std::vector<SafetyConstraint>& constraints,
                                     double radius) {
  std::vector<Edge> boundary = {arc_edge(radius, 0.0, 2.0 * std::numbers::pi)};
  for (const SafetyConstraint& c : constraints) {
    boundary = clip(boundary, c, radius);
    if (boundary.empty()) return std::nullopt;
  }
  if (violation(target, constraints, radius) <= 0.0) return target;
  Vec2 best = boundary.front().a;
  double best_d = (best - target).norm();
  for (const Edge& e : boundary) {
    const Vec2 q = nearest_on_edge(e, target, radius);
    const double d = (q - target).norm();
    if (d < best_d) {
      best = q;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

std::vector<SafetyConstraint> build_constraints(const LidarScan& scan,
                                                const RayThresholds& thresholds,
                                                double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (thresholds.d_col.size() != scan.size()) {
    throw std::invalid_argument("threshold table does not match the scan");
  }
  std::vector<SafetyConstraint> out;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double d = scan.ranges[i];
    if (d >= thresholds.d_crit[i]) continue;
    const double a = scan.angle(i);
    out.push_back({{std::cos(a), std::sin(a)}, (d - thresholds.d_col[i]) / tau});
  }
  return out;
}

std::vector<SafetyConstraint> build_constraints(const LidarScan& scan,
                                                const CollisionCapsule& capsule,
                                                double tau) {
  RayThresholds t;
  t.d_col.resize(scan.size());
  t.d_crit.resize(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const CapsuleDistance d = capsule_threshold(capsule, scan.angle(i));
    t.d_col[i] = d.d_col;
    t.d_crit[i] = d.d_crit;
  }
  return build_constraints(scan, t, tau);
}

ProjectionResult project_velocity(Vec2 point,
                                  const std::vector<SafetyConstraint>& constraints,
                                  double radius) {
  ProjectionResult out;
  const std::size_t m = constraints.size();
  // Dykstra correction terms; index m is the disk.
  std::vector<Vec2> corr(m + 1);
  Vec2 x = point;
  for (int it = 0; it < kRdsMaxIterations; ++it) {
    const Vec2 start = x;
    for (std::size_t i = 0; i <= m; ++i) {
      const Vec2 y = x + corr[i];
      const Vec2 p = i < m ? project_half_plane(y, constraints[i]) : project_disk(y, radius);
      corr[i] = y - p;
      x = p;
    }
    out.iterations = it + 1;
    if ((x - start).norm() < kRdsTolerance &&
        violation(x, constraints, radius) <= kRdsTolerance) {
      break;
    }
  }
  out.velocity = x;
  out.max_violation = violation(x, constraints, radius);
  out.feasible = out.max_violation <= kRdsTolerance;
  if (out.feasible && is_optimal(x, point, constraints, radius)) return out;
  // Dykstra stalls in thin wedges; settle those cases exactly.
  out.refined = true;
  const std::optional<Vec2> exact = exact_projection(point, constraints, radius);
  out.feasible = exact.has_value();
  if (exact) out.velocity = *exact;
  out.max_violation = violation(out.velocity, constraints, radius);
  return out;
}

VelocityCommand solve_rds(const UserInput& u,
                          const std::vector<SafetyConstraint>& constraints,
                          double v_max_lin, double omega_max, double heading_gain) {
  VelocityCommand cmd;
  const ProjectionResult r =
      project_velocity({v_max_lin * u.ux, v_max_lin * u.uy}, constraints, v_max_lin);
  if (r.feasible) {
    cmd.vx = r.velocity.x;
    cmd.vy = r.velocity.y;
  }
  if (u.norm() > 0.0) {
    cmd.omega = std::clamp(heading_gain * std::atan2(u.uy, u.ux), -omega_max, omega_max);
  }
  return cmd;
}

}  // namespace shared_control
