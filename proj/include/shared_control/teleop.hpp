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

// Teleoperation session and its JSON wire protocol (websocket /teleop).
//
// Client -> server, one JSON object per message:
//   {"type": "input", "ux": <number>, "uy": <number>}
//       Raw joystick, forward = +x, left = +y. Clamped to the unit disk
//       with the manual deadzone. Latest wins; held until the next input.
//   {"type": "reset"}
//       New start pose in the current world; clears the trajectory.
//   {"type": "select_world", "world": <name>}
//       A name from the "worlds" list of the world message.
//   {"type": "select_policy", "policy": <name>}
//       A name from the "policies" list of the world message.
//   {"type": "pause", "paused": <bool>}
//       Freezes the simulation; frames keep flowing with a frozen sim_step.
//
// Server -> client:
//   {"type": "world", "world": <name>, "arena_half_extent": <m>,
//    "obstacles": [...world file schema...], "worlds": [<name>...],
//    "policies": [<name>...], "policy": <name>,
//    "capsule": {"radius_col", "radius_crit", "segment_half_length"},
//    "lidar": {"n_rays", "min_range", "max_range"}, "sim_hz", "frame_hz"}
//       Sent on connect and whenever the world or policy changes.
//   {"type": "frame", "tick": <int>, "sim_step": <int>, "paused": <bool>,
//    "pose": {"x", "y", "yaw"}, "command": {"vx", "vy", "omega"},
//    "input": {"ux", "uy"}, "lidar": {"angle_offset", "angle_step",
//    "ranges": [<= 90 values]}, "trajectory": [[x, y], ...],
//    "zones": {"collision": <bool>, "critical": <bool>},
//    "policy": <name>, "event": <"" | "collision" | "reset">}
//       tick grows by one per frame; sim_step counts simulation steps
//       since the last reset.
//   {"type": "error", "message": <text>}
//       The offending message had no effect.

#ifndef SHARED_CONTROL_TELEOP_HPP_
#define SHARED_CONTROL_TELEOP_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shared_control/environment.hpp"
#include "shared_control/evaluation.hpp"

namespace shared_control {

inline constexpr int kTeleopSimHz = 40;
inline constexpr int kTeleopFrameHz = 20;
inline constexpr int kTeleopMaxFrameRays = 90;
inline constexpr std::size_t kTeleopTrajectoryPoints = 200;

struct TeleopCatalog {
  // Custom worlds by name; the four training kinds are always available as
  // empty, cylinder, box and door.
  std::map<std::string, std::shared_ptr<const WorldSpec>> worlds;
  // Policy name -> checkpoint path; rds, zero and echo are built in.
  std::map<std::string, std::string> checkpoints;
  std::string initial_world = "empty";
  std::string initial_policy = "rds";
  double v_max_lin = kEvalVMaxLin;
  double omega_max = kEvalOmegaMax;
  std::uint64_t seed = 0;

  std::vector<std::string> world_names() const;
  std::vector<std::string> policy_names() const;
};

// One driving session. Not thread safe; the server drives it from a single
// executor.
class TeleopSession {
 public:
  explicit TeleopSession(TeleopCatalog catalog);

  // Applies a client message. Returns an error message object for
  // malformed or rejected messages; a world message when the world or policy
  // changed; nullopt otherwise.
  std::optional<nlohmann::json> handle_message(const std::string& text);

  // Latest-wins input slot.
  void set_input(double ux, double uy);

  // One simulation step (no-op while paused).
  void step();

  // Frame for the current state; increments tick.
  nlohmann::json next_frame();
  nlohmann::json world_message() const;

  const EpisodeState& state() const { return state_; }
  bool paused() const { return paused_; }
  std::int64_t tick() const { return tick_; }
  std::int64_t sim_step() const { return sim_step_; }
  const std::string& policy_name() const { return policy_name_; }
  const std::string& world_name() const { return world_name_; }
  UserInput input() const { return input_; }

 private:
  void select_world(const std::string& name);
  void select_policy(const std::string& name);
  void reset_episode();

  TeleopCatalog catalog_;
  EnvConfig config_;
  RayThresholds thresholds_;
  Rng rng_;
  std::unique_ptr<Controller> controller_;
  std::string policy_name_;
  std::string world_name_;
  EpisodeState state_;
  UserInput input_;
  VelocityCommand last_command_;
  LidarScan last_scan_;
  bool last_collision_ = false;
  bool last_critical_ = false;
  std::string event_;
  bool paused_ = false;
  std::int64_t tick_ = 0;
  std::int64_t sim_step_ = 0;
  std::deque<Vec2> trajectory_;
};

}  // namespace shared_control

#endif  // SHARED_CONTROL_TELEOP_HPP_
