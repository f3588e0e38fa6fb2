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

#include "shared_control/teleop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shared_control/world_io.hpp"

namespace shared_control {
namespace {

using nlohmann::json;

const char* const kBuiltinWorlds[] = {"empty", "cylinder", "box", "door"};
const char* const kBuiltinPolicies[] = {"rds", "zero", "echo"};

json error(const std::string& message) { return {{"type", "error"}, {"message", message}}; }

bool is_builtin_world(const std::string& name) {
  for (const char* w : kBuiltinWorlds) {
    if (name == w) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> TeleopCatalog::world_names() const {
  std::vector<std::string> out(std::begin(kBuiltinWorlds), std::end(kBuiltinWorlds));
  for (const auto& [name, world] : worlds) {
    if (!is_builtin_world(name)) out.push_back(name);
  }
  return out;
}

std::vector<std::string> TeleopCatalog::policy_names() const {
  std::vector<std::string> out(std::begin(kBuiltinPolicies), std::end(kBuiltinPolicies));
  for (const auto& [name, path] : checkpoints) out.push_back(name);
  return out;
}

TeleopSession::TeleopSession(TeleopCatalog catalog)
    : catalog_(std::move(catalog)), rng_(catalog_.seed) {
  config_.v_max_lin = catalog_.v_max_lin;
  config_.omega_max = catalog_.omega_max;
  world_name_ = catalog_.initial_world;
  select_policy(catalog_.initial_policy);
  select_world(catalog_.initial_world);
}

void TeleopSession::select_policy(const std::string& name) {
  std::unique_ptr<Controller> next;
  if (name == "rds" || name == "zero" || name == "echo") {
    next = make_controller(name);
  } else {
    const auto it = catalog_.checkpoints.find(name);
    if (it == catalog_.checkpoints.end()) {
      throw std::invalid_argument("unknown policy '" + name + "'");
    }
    next = make_controller(it->second);
  }
  const bool rays_changed = next->n_rays() != config_.lidar.n_rays;
  controller_ = std::move(next);
  policy_name_ = name;
  controller_->reset();
  config_.lidar.n_rays = controller_->n_rays();
  thresholds_ = ray_thresholds(config_.capsule, config_.lidar);
  if (rays_changed && state_.world) {
    last_scan_ = raycast(*state_.world, state_.pose, config_.lidar);
  }
}

void TeleopSession::select_world(const std::string& name) {
  if (!is_builtin_world(name) && !catalog_.worlds.count(name)) {
    throw std::invalid_argument("unknown world '" + name + "'");
  }
  world_name_ = name;
  reset_episode();
}

void TeleopSession::reset_episode() {
  const auto custom = catalog_.worlds.find(world_name_);
  if (custom != catalog_.worlds.end()) {
    state_ = reset_in_world(config_, custom->second, rng_);
  } else {
    EnvConfig c = config_;
    c.kind = parse_env_kind(world_name_);
    state_ = reset(c, rng_);
  }
  controller_->reset();
  sim_step_ = 0;
  trajectory_.clear();
  trajectory_.push_back(state_.pose.position);
  last_command_ = {};
  last_scan_ = raycast(*state_.world, state_.pose, config_.lidar);
  last_collision_ = false;
  last_critical_ = false;
  event_ = "reset";
}

void TeleopSession::set_input(double ux, double uy) { input_ = clamp_manual_input(ux, uy); }

std::optional<json> TeleopSession::handle_message(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception&) {
    return error("message is not valid JSON");
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return error("message needs a string 'type'");
  }
  const std::string type = msg["type"];
  try {
    if (type == "input") {
      if (!msg.contains("ux") || !msg.contains("uy") || !msg["ux"].is_number() ||
          !msg["uy"].is_number()) {
        return error("input needs numeric ux and uy");
      }
      const double ux = msg["ux"];
      const double uy = msg["uy"];
      if (!std::isfinite(ux) || !std::isfinite(uy)) return error("input must be finite");
      set_input(ux, uy);
      return std::nullopt;
    }
    if (type == "reset") {
      reset_episode();
      return std::nullopt;
    }
    if (type == "select_world") {
      if (!msg.contains("world") || !msg["world"].is_string()) {
        return error("select_world needs a string 'world'");
      }
      select_world(msg["world"]);
      return world_message();
    }
    if (type == "select_policy") {
      if (!msg.contains("policy") || !msg["policy"].is_string()) {
        return error("select_policy needs a string 'policy'");
      }
      select_policy(msg["policy"]);
      return world_message();
    }
    if (type == "pause") {
      if (!msg.contains("paused") || !msg["paused"].is_boolean()) {
        return error("pause needs a boolean 'paused'");
      }
      paused_ = msg["paused"];
      return std::nullopt;
    }
  } catch (const std::exception& e) {
    return error(e.what());
  }
  return error("unknown message type '" + type + "'");
}

void TeleopSession::step() {
  if (paused_) return;
  StepOptions options;
  options.manual_input = input_;
  options.goal_check = false;
  options.timeout_check = false;
  const Observed observed = observe(state_, config_, input_);
  ActionVector action = controller_->act(observed, config_);
  for (double& v : action.values) v = std::clamp(v, -1.0, 1.0);
  auto [next, result] = shared_control::step(state_, action, config_, RewardWeights{},
                                              thresholds_, options);
  ++sim_step_;
  last_command_ = scale_action(action, config_.v_max_lin, config_.omega_max);
  last_collision_ = result.any_collision;
  last_critical_ = result.any_critical;
  if (result.any_collision) {
    // The chair is placed anew; the frame still reports the collision.
    reset_episode();
    last_collision_ = true;
    event_ = "collision";
    return;
  }
  state_ = std::move(next);
  last_scan_ = std::move(result.scan);
  trajectory_.push_back(state_.pose.position);
  while (trajectory_.size() > kTeleopTrajectoryPoints) trajectory_.pop_front();
}

json TeleopSession::next_frame() {
  const std::size_t n = last_scan_.size();
  const std::size_t stride =
      std::max<std::size_t>(1, (n + kTeleopMaxFrameRays - 1) / kTeleopMaxFrameRays);
  json ranges = json::array();
  for (std::size_t i = 0; i < n; i += stride) ranges.push_back(last_scan_.ranges[i]);
  json trajectory = json::array();
  for (const Vec2& p : trajectory_) trajectory.push_back({p.x, p.y});
  const double angle_step = n > 0 ? 2.0 * std::numbers::pi * stride / n : 0.0;
  json frame = {
      {"type", "frame"},
      {"tick", tick_++},
      {"sim_step", sim_step_},
      {"paused", paused_},
      {"pose", {{"x", state_.pose.position.x}, {"y", state_.pose.position.y},
                {"yaw", state_.pose.yaw}}},
      {"command", {{"vx", last_command_.vx}, {"vy", last_command_.vy},
                   {"omega", last_command_.omega}}},
      {"input", {{"ux", input_.ux}, {"uy", input_.uy}}},
      {"lidar", {{"angle_offset", last_scan_.angle_offset}, {"angle_step", angle_step},
                 {"ranges", ranges}}},
      {"trajectory", trajectory},
      {"zones", {{"collision", last_collision_}, {"critical", last_critical_}}},
      {"policy", policy_name_},
      {"event", event_},
  };
  event_.clear();
  return frame;
}

json TeleopSession::world_message() const {
  json world = world_to_json(*state_.world);
  return {{"type", "world"},
          {"world", world_name_},
          {"arena_half_extent", world["arena_half_extent"]},
          {"obstacles", world["obstacles"]},
          {"worlds", catalog_.world_names()},
          {"policies", catalog_.policy_names()},
          {"policy", policy_name_},
          {"capsule", {{"radius_col", config_.capsule.radius_col},
                       {"radius_crit", config_.capsule.radius_crit},
                       {"segment_half_length", config_.capsule.segment_half_length}}},
          {"lidar", {{"n_rays", config_.lidar.n_rays},
                     {"min_range", config_.lidar.min_range},
                     {"max_range", config_.lidar.max_range}}},
          {"sim_hz", kTeleopSimHz},
          {"frame_hz", kTeleopFrameHz}};
}

}  // namespace shared_control
