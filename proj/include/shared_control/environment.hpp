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

// Training environments (empty, cylinders, box, door), the episode step and
// the curriculum.

#ifndef SHARED_CONTROL_ENVIRONMENT_HPP_
#define SHARED_CONTROL_ENVIRONMENT_HPP_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shared_control/action.hpp"
#include "shared_control/geometry.hpp"
#include "shared_control/observation.hpp"
#include "shared_control/reward.hpp"
#include "shared_control/rng.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

enum class EnvKind { kEmpty, kCylinder, kBox, kDoor };

// Accepts a/b/c/d or empty/cylinder/box/door.
EnvKind parse_env_kind(std::string_view name);
std::string_view env_kind_name(EnvKind kind);
// Comma separated list, e.g. "a,b,c".
std::vector<EnvKind> parse_env_set(std::string_view list);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double at(double unit) const { return lo + (hi - lo) * unit; }
};

struct RandomizationRanges {
  Interval box_length{1.0, 4.0};
  Interval box_width{1.0, 2.0};
  Interval door_width{0.9, 1.75};
  // Distance of the box start from the near face.
  Interval box_start_gap{1.0, 3.0};
};

struct EnvConfig {
  EnvKind kind = EnvKind::kEmpty;
  LidarSpec lidar;
  CollisionCapsule capsule;
  double v_max_lin = 1.0;
  double omega_max = 1.0;
  double dt = 1.0 / 40.0;
  int max_steps = 1200;
  double goal_radius = 0.3;
  double arena_half_extent = 5.0;
  double door_wall_thickness = 0.2;
  // Sampled poses and targets keep this distance to the arena walls.
  double wall_margin = 1.0;
  double min_start_target_distance = 1.0;
  RandomizationRanges ranges;
};

void validate(const EnvConfig& config);

struct EpisodeState {
  Pose2D pose;
  Vec2 target;  // drives the simulated user only; never observed
  VelocityCommand measured_velocity;
  ActionVector last_action;
  ActionVector second_last_action;
  int step_count = 0;
  std::shared_ptr<const WorldSpec> world;
};

enum class DoneReason { kRunning, kCollision, kGoalReached, kTimeout };
std::string_view done_reason_name(DoneReason reason);

struct StepResult {
  ObservationVector observation;
  RewardBreakdown reward;
  bool done = false;
  DoneReason done_reason = DoneReason::kRunning;
  LidarScan scan;
  UserInput user_input;  // input after the step (part of the observation)
  double phi = 0.0;
  bool any_collision = false;
  bool any_critical = false;
};

struct StepOptions {
  // Replaces the simulated user (teleoperation).
  std::optional<UserInput> manual_input;
  bool goal_check = true;
  bool timeout_check = true;
};

class ResetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxResetAttempts = 1000;

// Affine maps of unit draws onto the randomization ranges.
std::pair<double, double> box_dimensions(const RandomizationRanges& ranges,
                                         double unit_length, double unit_width);
double door_width(const RandomizationRanges& ranges, double unit);

// The four fixed cylinders of the cylinder environment.
std::vector<ObstacleShape> cylinder_layout();
// Wall along x = 0 with an opening of `width` centered at y = 0.
std::vector<ObstacleShape> door_wall(double arena_half_extent, double width,
                                     double thickness);

// Throws ResetError if no admissible pose/target is found in
// kMaxResetAttempts draws.
EpisodeState reset(const EnvConfig& config, Rng& rng);

// Places the robot in a given world with rejection-sampled pose and target
// (used by custom worlds such as the teleop layouts).
EpisodeState reset_in_world(const EnvConfig& config,
                            std::shared_ptr<const WorldSpec> world, Rng& rng);

struct Observed {
  ObservationVector observation;
  LidarScan scan;
  UserInput user_input;
};

Observed observe(const EpisodeState& state, const EnvConfig& config,
                 const std::optional<UserInput>& manual_input = std::nullopt);

std::pair<EpisodeState, StepResult> step(const EpisodeState& state,
                                         const ActionVector& action,
                                         const EnvConfig& config,
                                         const RewardWeights& weights,
                                         const RayThresholds& thresholds,
                                         const StepOptions& options = {});

std::pair<EpisodeState, StepResult> step(const EpisodeState& state,
                                         const ActionVector& action,
                                         const EnvConfig& config,
                                         const RewardWeights& weights);

inline constexpr int kCurriculumStageOneEpochs = 50;

// Fraction of the environment batch assigned to each kind at `epoch`.
std::vector<std::pair<EnvKind, double>> curriculum_schedule(
    int epoch, const std::vector<EnvKind>& env_set,
    int stage_one_epochs = kCurriculumStageOneEpochs);

// Per-environment kinds for a batch of n_envs, spread evenly.
std::vector<EnvKind> assign_env_kinds(int epoch, const std::vector<EnvKind>& env_set,
                                      int n_envs,
                                      int stage_one_epochs = kCurriculumStageOneEpochs);

}  // namespace shared_control

#endif  // SHARED_CONTROL_ENVIRONMENT_HPP_
