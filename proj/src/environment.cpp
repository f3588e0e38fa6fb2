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

#include "shared_control/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shared_control {
namespace {

constexpr double kPi = std::numbers::pi;

bool pose_is_free(const WorldSpec& world, const Pose2D& pose,
                  const EnvConfig& config, const RayThresholds& thresholds) {
  const LidarScan scan = raycast(world, pose, config.lidar);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan.ranges[i] < thresholds.d_crit[i]) return false;
  }
  // Rays can pass between thin features; the footprint itself must be clear.
  return clearance(world, pose.position) >= config.capsule.radius_crit;
}

bool target_is_free(const WorldSpec& world, const Vec2& target,
                    const EnvConfig& config) {
  return clearance(world, target) >=
         config.capsule.radius_crit + config.capsule.segment_half_length;
}

Vec2 uniform_point(Rng& rng, double half) {
  const double x = rng.uniform(-half, half);
  const double y = rng.uniform(-half, half);
  return {x, y};
}

double uniform_yaw(Rng& rng) { return normalize_angle(rng.uniform(-kPi, kPi)); }

EpisodeState fresh_state(std::shared_ptr<const WorldSpec> world,
                         const Pose2D& pose, const Vec2& target) {
  EpisodeState s;
  s.pose = pose;
  s.target = target;
  s.world = std::move(world);
  return s;
}

EpisodeState reset_open(const EnvConfig& config,
                        std::shared_ptr<const WorldSpec> world, Rng& rng,
                        const RayThresholds& thresholds) {
  const double half = world->arena_half_extent - config.wall_margin;
  for (int attempt = 0; attempt < kMaxResetAttempts; ++attempt) {
    Pose2D pose{uniform_point(rng, half), uniform_yaw(rng)};
    const Vec2 target = uniform_point(rng, half);
    if ((target - pose.position).norm() < config.min_start_target_distance) continue;
    if (!pose_is_free(*world, pose, config, thresholds)) continue;
    if (!target_is_free(*world, target, config)) continue;
    return fresh_state(std::move(world), pose, target);
  }
  throw ResetError("no admissible start/target after " +
                   std::to_string(kMaxResetAttempts) + " draws");
}

EpisodeState reset_box(const EnvConfig& config, Rng& rng,
                       const RayThresholds& thresholds) {
  for (int attempt = 0; attempt < kMaxResetAttempts; ++attempt) {
    const double u_len = rng.uniform();
    const double u_wid = rng.uniform();
    const auto [length, width] = box_dimensions(config.ranges, u_len, u_wid);
    const double gap = config.ranges.box_start_gap.at(rng.uniform());
    const int quarter = static_cast<int>(rng.below(4));
    const double rotation = quarter * 0.5 * kPi;
    // Unrotated layout: approach along +x, the box length spans y.
    Vec2 half{0.5 * width, 0.5 * length};
    if (quarter % 2 == 1) std::swap(half.x, half.y);
    auto world = std::make_shared<WorldSpec>();
    world->arena_half_extent = config.arena_half_extent;
    world->obstacles.emplace_back(AxisBox{{0.0, 0.0}, half});
    const double offset = 0.5 * width + gap;
    Pose2D pose{rotate({-offset, 0.0}, rotation), uniform_yaw(rng)};
    const Vec2 target = rotate({offset, 0.0}, rotation);
    const double limit = config.arena_half_extent - config.wall_margin + 1e-9;
    if (std::abs(pose.position.x) > limit || std::abs(pose.position.y) > limit) continue;
    if (!pose_is_free(*world, pose, config, thresholds)) continue;
    if (!target_is_free(*world, target, config)) continue;
    return fresh_state(std::move(world), pose, target);
  }
  throw ResetError("box environment: no admissible layout");
}

EpisodeState reset_door(const EnvConfig& config, Rng& rng,
                        const RayThresholds& thresholds) {
  const double half = config.arena_half_extent - config.wall_margin;
  for (int attempt = 0; attempt < kMaxResetAttempts; ++attempt) {
    const double width = door_width(config.ranges, rng.uniform());
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    auto world = std::make_shared<WorldSpec>();
    world->arena_half_extent = config.arena_half_extent;
    world->obstacles = door_wall(config.arena_half_extent, width,
                                 config.door_wall_thickness);
    Pose2D pose;
    pose.position = {side * rng.uniform(1.0, half), rng.uniform(-half, half)};
    pose.yaw = uniform_yaw(rng);
    // Opposing quadrant: other side of the wall, other half in y.
    const double y_sign = pose.position.y >= 0.0 ? -1.0 : 1.0;
    const Vec2 target{-side * rng.uniform(1.0, half),
                      y_sign * rng.uniform(0.0, half)};
    if (!pose_is_free(*world, pose, config, thresholds)) continue;
    if (!target_is_free(*world, target, config)) continue;
    return fresh_state(std::move(world), pose, target);
  }
  throw ResetError("door environment: no admissible layout");
}

}  // namespace

EnvKind parse_env_kind(std::string_view name) {
  if (name == "a" || name == "empty") return EnvKind::kEmpty;
  if (name == "b" || name == "cylinder") return EnvKind::kCylinder;
  if (name == "c" || name == "box") return EnvKind::kBox;
  if (name == "d" || name == "door") return EnvKind::kDoor;
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

std::string_view env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kEmpty: return "empty";
    case EnvKind::kCylinder: return "cylinder";
    case EnvKind::kBox: return "box";
    case EnvKind::kDoor: return "door";
  }
  return "unknown";
}

std::vector<EnvKind> parse_env_set(std::string_view list) {
  std::vector<EnvKind> kinds;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item =
        list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
    if (!item.empty()) {
      const EnvKind kind = parse_env_kind(item);
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        kinds.push_back(kind);
      }
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (kinds.empty()) throw std::invalid_argument("empty environment set");
  return kinds;
}

std::string_view done_reason_name(DoneReason reason) {
  switch (reason) {
    case DoneReason::kRunning: return "running";
    case DoneReason::kCollision: return "collision";
    case DoneReason::kGoalReached: return "goal";
    case DoneReason::kTimeout: return "timeout";
  }
  return "unknown";
}

void validate(const EnvConfig& config) {
  validate(config.lidar);
  validate(config.capsule);
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (config.max_steps <= 0) throw std::invalid_argument("max_steps must be > 0");
  if (!(config.goal_radius > 0.0)) throw std::invalid_argument("goal_radius must be > 0");
  if (!(config.v_max_lin > 0.0 && config.omega_max > 0.0)) {
    throw std::invalid_argument("velocity limits must be > 0");
  }
  if (!(config.arena_half_extent > config.wall_margin + 1.0)) {
    throw std::invalid_argument("arena too small for the wall margin");
  }
}

std::pair<double, double> box_dimensions(const RandomizationRanges& ranges,
                                         double unit_length, double unit_width) {
  return {ranges.box_length.at(unit_length), ranges.box_width.at(unit_width)};
}

double door_width(const RandomizationRanges& ranges, double unit) {
  return ranges.door_width.at(unit);
}

std::vector<ObstacleShape> cylinder_layout() {
  return {Circle{{1.5, 1.0}, 0.4}, Circle{{-2.0, 1.8}, 0.4},
          Circle{{-1.2, -2.2}, 0.4}, Circle{{2.3, -1.5}, 0.4}};
}

std::vector<ObstacleShape> door_wall(double arena_half_extent, double width,
                                     double thickness) {
  const double h = arena_half_extent;
  const double opening = 0.5 * width;
  return {Segment{{0.0, -h}, {0.0, -opening}, thickness},
          Segment{{0.0, opening}, {0.0, h}, thickness}};
}

EpisodeState reset(const EnvConfig& config, Rng& rng) {
  const RayThresholds thresholds = ray_thresholds(config.capsule, config.lidar);
  switch (config.kind) {
    case EnvKind::kEmpty: {
      auto world = std::make_shared<WorldSpec>();
      world->arena_half_extent = config.arena_half_extent;
      return reset_open(config, std::move(world), rng, thresholds);
    }
    case EnvKind::kCylinder: {
      auto world = std::make_shared<WorldSpec>();
      world->arena_half_extent = config.arena_half_extent;
      world->obstacles = cylinder_layout();
      return reset_open(config, std::move(world), rng, thresholds);
    }
    case EnvKind::kBox:
      return reset_box(config, rng, thresholds);
    case EnvKind::kDoor:
      return reset_door(config, rng, thresholds);
  }
  throw std::invalid_argument("unknown environment kind");
}

EpisodeState reset_in_world(const EnvConfig& config,
                            std::shared_ptr<const WorldSpec> world, Rng& rng) {
  return reset_open(config, std::move(world), rng,
                    ray_thresholds(config.capsule, config.lidar));
}

Observed observe(const EpisodeState& state, const EnvConfig& config,
                 const std::optional<UserInput>& manual_input) {
  Observed out;
  out.scan = raycast(*state.world, state.pose, config.lidar);
  out.user_input = manual_input ? *manual_input
                                : simulated_input(state.pose, state.target);
  out.observation = assemble_observation(
      out.scan, config.lidar.max_range, out.user_input, state.measured_velocity,
      config.v_max_lin, config.omega_max, state.last_action,
      state.second_last_action);
  return out;
}

std::pair<EpisodeState, StepResult> step(const EpisodeState& state,
                                         const ActionVector& action,
                                         const EnvConfig& config,
                                         const RewardWeights& weights,
                                         const RayThresholds& thresholds,
                                         const StepOptions& options) {
  ActionVector a = action;
  for (double& v : a.values) v = std::clamp(v, -1.0, 1.0);

  // The input the policy acted on; tracking is scored against it.
  const UserInput acted_on = options.manual_input
                                 ? *options.manual_input
                                 : simulated_input(state.pose, state.target);

  EpisodeState next = state;
  const VelocityCommand cmd = scale_action(a, config.v_max_lin, config.omega_max);
  next.pose = integrate_kinematics(state.pose, cmd, config.dt);
  next.measured_velocity = cmd;
  next.second_last_action = state.last_action;
  next.last_action = a;
  next.step_count = state.step_count + 1;

  StepResult result;
  result.scan = raycast(*next.world, next.pose, config.lidar);
  result.user_input = options.manual_input
                          ? *options.manual_input
                          : simulated_input(next.pose, next.target);
  result.phi = heading_angle(result.user_input);
  result.reward = total_reward(result.scan, thresholds, a, state.last_action,
                               state.second_last_action, acted_on, result.phi,
                               weights);
  for (std::size_t i = 0; i < result.scan.size(); ++i) {
    const double d = result.scan.ranges[i];
    if (d < thresholds.d_col[i]) {
      result.any_collision = true;
    } else if (d < thresholds.d_crit[i]) {
      result.any_critical = true;
    }
  }

  if (result.any_collision) {
    result.done_reason = DoneReason::kCollision;
  } else if (options.goal_check &&
             (next.pose.position - next.target).norm() < config.goal_radius) {
    result.done_reason = DoneReason::kGoalReached;
  } else if (options.timeout_check && next.step_count >= config.max_steps) {
    result.done_reason = DoneReason::kTimeout;
  }
  result.done = result.done_reason != DoneReason::kRunning;

  result.observation = assemble_observation(
      result.scan, config.lidar.max_range, result.user_input,
      next.measured_velocity, config.v_max_lin, config.omega_max,
      next.last_action, next.second_last_action);
  return {std::move(next), std::move(result)};
}

std::pair<EpisodeState, StepResult> step(const EpisodeState& state,
                                         const ActionVector& action,
                                         const EnvConfig& config,
                                         const RewardWeights& weights) {
  return step(state, action, config, weights,
              ray_thresholds(config.capsule, config.lidar));
}

std::vector<std::pair<EnvKind, double>> curriculum_schedule(
    int epoch, const std::vector<EnvKind>& env_set, int stage_one_epochs) {
  if (epoch < stage_one_epochs || env_set.empty()) return {{EnvKind::kEmpty, 1.0}};
  std::vector<std::pair<EnvKind, double>> out;
  const double share = 1.0 / static_cast<double>(env_set.size());
  for (EnvKind kind : env_set) out.emplace_back(kind, share);
  return out;
}

std::vector<EnvKind> assign_env_kinds(int epoch, const std::vector<EnvKind>& env_set,
                                      int n_envs, int stage_one_epochs) {
  const auto schedule = curriculum_schedule(epoch, env_set, stage_one_epochs);
  std::vector<EnvKind> kinds(n_envs);
  for (int i = 0; i < n_envs; ++i) {
    kinds[i] = schedule[static_cast<std::size_t>(i) % schedule.size()].first;
  }
  return kinds;
}

}  // namespace shared_control
