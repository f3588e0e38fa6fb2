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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "shared_control/evaluation.hpp"
#include "shared_control/rds.hpp"
#include "support/oracles.hpp"

namespace shared_control {
namespace {

LidarScan free_scan(int n) {
  LidarScan scan;
  scan.ranges.assign(n, 2.5);
  return scan;
}

TEST(BuildConstraints, FreeScanIsUnconstrained) {
  EXPECT_TRUE(build_constraints(free_scan(360), CollisionCapsule{}, 2.0).empty());
}

TEST(BuildConstraints, ObstacleDeadAhead) {
  LidarScan scan = free_scan(360);
  scan.ranges[0] = 0.575;
  const auto c = build_constraints(scan, CollisionCapsule{}, 1.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].normal.x, 1.0, 1e-15);
  EXPECT_NEAR(c[0].normal.y, 0.0, 1e-15);
  EXPECT_NEAR(c[0].offset, 0.1, 1e-12);
}

TEST(BuildConstraints, AtCollisionDistanceAllowsOnlySliding) {
  LidarScan scan = free_scan(360);
  scan.ranges[90] = 0.325;  // lateral, exactly d_col
  const auto c = build_constraints(scan, CollisionCapsule{}, 2.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].offset, 0.0, 1e-12);
  const VelocityCommand cmd = solve_rds({0.6, 0.8}, c, 1.0, 2.0);
  EXPECT_LE(cmd.vy, 1e-6);
  EXPECT_NEAR(cmd.vx, 0.6, 1e-6);
}

TEST(BuildConstraints, RejectsNonPositiveTau) {
  EXPECT_THROW(build_constraints(free_scan(36), CollisionCapsule{}, 0.0), std::invalid_argument);
}

TEST(SolveRds, Examples) {
  const VelocityCommand free = solve_rds({1.0, 0.0}, {}, 0.67, 2.0);
  EXPECT_EQ(free, (VelocityCommand{0.67, 0.0, 0.0}));
  const std::vector<SafetyConstraint> ahead = {{{1.0, 0.0}, 0.1}};
  const VelocityCommand slowed = solve_rds({1.0, 0.0}, ahead, 1.0, 1.0);
  EXPECT_NEAR(slowed.vx, 0.1, 1e-9);
  EXPECT_NEAR(slowed.vy, 0.0, 1e-9);
  EXPECT_EQ(slowed.omega, 0.0);
  const VelocityCommand turn = solve_rds({0.6, 0.8}, {}, 1.0, 2.0, 1.0);
  EXPECT_NEAR(turn.omega, std::atan2(0.8, 0.6), 1e-15);
  EXPECT_NEAR(turn.omega, 0.9273, 1e-4);
  const VelocityCommand clamped = solve_rds({-1.0, 0.0}, {}, 1.0, 2.0, 1.0);
  EXPECT_EQ(clamped.omega, 2.0);
}

TEST(SolveRds, ZeroInputIsExactlyStationary) {
  LidarScan scan = free_scan(360);
  scan.ranges[10] = 0.6;
  const auto c = build_constraints(scan, CollisionCapsule{}, 2.0);
  EXPECT_EQ(solve_rds({0.0, 0.0}, c, 0.67, 2.0), VelocityCommand{});
}

TEST(SolveRds, IdentityWithoutConstraints) {
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double a = rng.uniform(-3.14, 3.14);
    const double r = rng.uniform(0.0, 1.0);
    const UserInput u{r * std::cos(a), r * std::sin(a)};
    const VelocityCommand cmd = solve_rds(u, {}, 0.67, 2.0);
    EXPECT_NEAR(cmd.vx, 0.67 * u.ux, 1e-15);
    EXPECT_NEAR(cmd.vy, 0.67 * u.uy, 1e-15);
  }
}

TEST(SolveRds, InfeasibleSetStopsTranslation) {
  const std::vector<SafetyConstraint> boxed = {{{1.0, 0.0}, -0.2}, {{-1.0, 0.0}, -0.2}};
  const ProjectionResult r = project_velocity({0.5, 0.0}, boxed, 1.0);
  EXPECT_FALSE(r.feasible);
  const VelocityCommand cmd = solve_rds({1.0, 0.0}, boxed, 1.0, 2.0);
  EXPECT_EQ(cmd.vx, 0.0);
  EXPECT_EQ(cmd.vy, 0.0);
}

// Projection against a 201 x 201 grid search over the velocity disk.
TEST(ProjectVelocity, MatchesGridOracle) {
  Rng rng(2);
  int compared = 0;
  for (int k = 0; k < 300; ++k) {
    const double radius = rng.uniform(0.3, 1.5);
    std::vector<SafetyConstraint> constraints;
    const int m = static_cast<int>(rng.below(6));
    for (int i = 0; i < m; ++i) {
      const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      constraints.push_back({{std::cos(a), std::sin(a)}, rng.uniform(-0.3, 1.0) * radius});
    }
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Vec2 target = Vec2{std::cos(a), std::sin(a)} * rng.uniform(0.0, radius);
    const ProjectionResult got = project_velocity(target, constraints, radius);
    const auto grid = oracle::grid_projection(target, constraints, radius);
    if (!grid) {
      // No grid point is feasible: the set is empty or thinner than a cell.
      if (got.feasible) {
        EXPECT_LE(got.max_violation, 1e-6);
      }
      continue;
    }
    ASSERT_TRUE(got.feasible) << "trial " << k;
    const double d = (got.velocity - target).norm();
    EXPECT_LE(d, grid->distance + 1e-9) << "trial " << k;
    ++compared;
  }
  EXPECT_GT(compared, 150);
}

// Projection against exact enumeration of the candidate optima.
TEST(ProjectVelocity, MatchesEnumeratedOptimum) {
  Rng rng(3);
  int compared = 0;
  int refined = 0;
  for (int k = 0; k < 2000; ++k) {
    const double radius = rng.uniform(0.3, 1.5);
    std::vector<SafetyConstraint> constraints;
    const int m = static_cast<int>(rng.below(12));
    for (int i = 0; i < m; ++i) {
      const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      constraints.push_back({{std::cos(a), std::sin(a)}, rng.uniform(-0.3, 1.0) * radius});
    }
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Vec2 target = Vec2{std::cos(a), std::sin(a)} * rng.uniform(0.0, 1.5 * radius);
    const ProjectionResult got = project_velocity(target, constraints, radius);
    const auto exact = oracle::enumerated_projection(target, constraints, radius);
    if (!exact) {
      EXPECT_FALSE(got.feasible) << "trial " << k;
      continue;
    }
    ASSERT_TRUE(got.feasible) << "trial " << k;
    EXPECT_LE((got.velocity - *exact).norm(), 1e-5) << "trial " << k;
    ++compared;
    refined += got.refined;
  }
  EXPECT_GT(compared, 500);
  // Thin wedges occur in this sample, so the exact stage is exercised.
  EXPECT_GT(refined, 0);
}

TEST(RdsController, NoCollisionsOnScenarioGrid) {
  for (const ScenarioSpec& spec : scenario_grid()) {
    RdsController rds;
    const ScenarioRun run = run_scenario(spec, rds);
    EXPECT_EQ(run.report.collision_records, 0) << spec.name();
    EXPECT_NE(run.report.done_reason, DoneReason::kCollision) << spec.name();
  }
}

}  // namespace
}  // namespace shared_control
