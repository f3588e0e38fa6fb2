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

#include "shared_control/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "shared_control/world_io.hpp"

namespace shared_control {
namespace {

constexpr int kStateVersion = 1;

// Stream ids for derive_seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kEnvStreamBase = 1000;

nlohmann::json action_json(const ActionVector& a) { return a.values; }

ActionVector action_from(const nlohmann::json& j) {
  ActionVector a;
  a.values = j.get<std::array<double, kActionSize>>();
  return a;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void validate(const TrainConfig& config) {
  validate(config.arch);
  validate(config.reward);
  validate(config.env);
  validate(config.hyper, config.arch.lstm > 0);
  if (config.env_set.empty()) throw std::invalid_argument("env set is empty");
  if (config.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (config.checkpoint_every <= 0) {
    throw std::invalid_argument("checkpoint_every must be positive");
  }
  if (config.env.lidar.n_rays != config.arch.n_rays) {
    throw std::invalid_argument("LiDAR has " + std::to_string(config.env.lidar.n_rays) +
                                " rays but " + config.arch.name + " expects " +
                                std::to_string(config.arch.n_rays));
  }
}

nlohmann::json to_json(const EpochStats& s) {
  return {{"epoch", s.epoch},
          {"transitions", s.transitions},
          {"mean_reward", s.mean_reward},
          {"mean_tracking", s.mean_tracking},
          {"episodes", s.episodes},
          {"collisions", s.collisions},
          {"goals", s.goals},
          {"timeouts", s.timeouts},
          {"collision_rate", s.collision_rate},
          {"goal_rate", s.goal_rate},
          {"mean_phi", s.mean_phi},
          {"mean_jerk", s.mean_jerk},
          {"policy_loss", s.policy_loss},
          {"value_loss", s.value_loss},
          {"entropy", s.entropy},
          {"clip_fraction", s.clip_fraction}};
}

Trainer::Trainer(TrainConfig config)
    : config_(std::move(config)),
      network_((validate(config_), config_.arch)),
      rng_(derive_seed(config_.seed, kShuffleStream)) {
  Rng init(derive_seed(config_.seed, kInitStream));
  params_ = network_.initialize(init, config_.hyper.initial_log_std);
  adam_ = AdamState(params_.size());
  thresholds_ = ray_thresholds(config_.env.capsule, config_.env.lidar);
  const PPOHyperparams& h = config_.hyper;
  buffer_ = RolloutBuffer(h.n_envs, h.horizon, network_.input_size(),
                          network_.recurrent_units(), h.bptt_chunk);
  slots_.resize(h.n_envs);
  for (int e = 0; e < h.n_envs; ++e) {
    Slot& s = slots_[e];
    s.rng = Rng(derive_seed(config_.seed, kEnvStreamBase + e));
    s.config = config_.env;
    s.recurrent = network_.initial_state();
  }
  const auto kinds =
      assign_env_kinds(0, config_.env_set, h.n_envs, config_.stage_one_epochs);
  for (int e = 0; e < h.n_envs; ++e) {
    slots_[e].config.kind = kinds[e];
    reset_slot(slots_[e]);
  }
}

void Trainer::reset_slot(Slot& slot) {
  slot.state = reset(slot.config, slot.rng);
  slot.observation = observe(slot.state, slot.config).observation;
  slot.recurrent.reset();
  slot.episode_start = true;
  slot.velocities.clear();
}

void Trainer::apply_curriculum() {
  const auto kinds = assign_env_kinds(epoch_, config_.env_set, config_.hyper.n_envs,
                                      config_.stage_one_epochs);
  for (std::size_t e = 0; e < slots_.size(); ++e) {
    if (slots_[e].config.kind != kinds[e]) {
      slots_[e].config.kind = kinds[e];
      reset_slot(slots_[e]);
    }
  }
}

const RolloutBuffer& Trainer::collect_rollouts(EpochStats& stats) {
  apply_curriculum();
  RolloutBuffer& b = buffer_;
  const int chunk = b.chunk;
  const int hu = b.recurrent_units;
  const auto log_std = network_.log_std(params_);
  const double dt = config_.env.dt;

  double reward_sum = 0.0;
  double tracking_sum = 0.0;
  double phi_sum = 0.0;
  std::size_t phi_count = 0;
  double jerk_sum = 0.0;
  std::size_t jerk_count = 0;

  for (int t = 0; t < b.horizon; ++t) {
    for (int e = 0; e < b.n_envs; ++e) {
      Slot& s = slots_[e];
      const std::size_t i = b.index(e, t);
      if (hu > 0 && t % chunk == 0) {
        const std::size_t off =
            (static_cast<std::size_t>(e) * b.chunks_per_env() + t / chunk) * hu;
        std::copy(s.recurrent.h.begin(), s.recurrent.h.end(), b.chunk_h.begin() + off);
        std::copy(s.recurrent.c.begin(), s.recurrent.c.end(), b.chunk_c.begin() + off);
      }
      b.episode_starts[i] = s.episode_start ? 1 : 0;
      std::copy(s.observation.values.begin(), s.observation.values.end(),
                b.observations.begin() + i * b.observation_size);

      PolicyOutput out = network_.forward(params_, s.observation.values, s.recurrent);
      const SampledAction sampled = sample_action(out.mean, log_std, s.rng);
      std::copy(sampled.pre_squash.begin(), sampled.pre_squash.end(),
                b.pre_squash.begin() + i * kActionSize);
      b.log_probs[i] = gaussian_log_prob(sampled.pre_squash, out.mean, log_std);
      b.values[i] = out.value;

      auto [next, result] =
          step(s.state, sampled.action, s.config, config_.reward, thresholds_);
      b.rewards[i] = result.reward.total;
      b.dones[i] = result.done ? 1 : 0;
      reward_sum += result.reward.total;
      tracking_sum += result.reward.tracking;
      if (result.user_input.norm() > 0.0) {
        phi_sum += result.phi;
        ++phi_count;
      }
      s.velocities.push_back(next.measured_velocity);
      if (s.velocities.size() == 3) {
        const VelocityCommand& a = s.velocities[0];
        const VelocityCommand& m = s.velocities[1];
        const VelocityCommand& c = s.velocities[2];
        const double jx = (c.vx - 2.0 * m.vx + a.vx) / (dt * dt);
        const double jy = (c.vy - 2.0 * m.vy + a.vy) / (dt * dt);
        const double jw = (c.omega - 2.0 * m.omega + a.omega) / (dt * dt);
        jerk_sum += std::sqrt(jx * jx + jy * jy + jw * jw);
        ++jerk_count;
        s.velocities.erase(s.velocities.begin());
      }

      if (result.done) {
        ++stats.episodes;
        if (result.done_reason == DoneReason::kCollision) ++stats.collisions;
        if (result.done_reason == DoneReason::kGoalReached) ++stats.goals;
        if (result.done_reason == DoneReason::kTimeout) ++stats.timeouts;
        reset_slot(s);
      } else {
        s.state = std::move(next);
        s.observation = std::move(result.observation);
        s.recurrent = std::move(out.state);
        s.episode_start = false;
      }
    }
  }
  for (int e = 0; e < b.n_envs; ++e) {
    const Slot& s = slots_[e];
    b.bootstrap_values[e] =
        network_.forward(params_, s.observation.values, s.recurrent).value;
  }

  stats.transitions = b.size();
  stats.mean_reward = reward_sum / static_cast<double>(b.size());
  stats.mean_tracking = tracking_sum / static_cast<double>(b.size());
  stats.mean_phi = phi_count > 0 ? phi_sum / static_cast<double>(phi_count) : 0.0;
  stats.mean_jerk = jerk_count > 0 ? jerk_sum / static_cast<double>(jerk_count) : 0.0;
  if (stats.episodes > 0) {
    stats.collision_rate = static_cast<double>(stats.collisions) / stats.episodes;
    stats.goal_rate = static_cast<double>(stats.goals) / stats.episodes;
  }
  return b;
}

EpochStats Trainer::run_epoch() {
  EpochStats stats;
  stats.epoch = epoch_;
  collect_rollouts(stats);
  const PPOHyperparams& h = config_.hyper;
  const GaeResult gae = compute_gae(buffer_.rewards, buffer_.values, buffer_.dones,
                                    buffer_.bootstrap_values, buffer_.n_envs,
                                    buffer_.horizon, h.gamma, h.gae_lambda);
  const UpdateStats u = ppo_update(network_, params_, adam_, buffer_, gae, h, rng_);
  stats.policy_loss = u.mean_policy_loss;
  stats.value_loss = u.mean_value_loss;
  stats.entropy = u.mean_entropy;
  stats.clip_fraction = u.mean_clip_fraction;
  ++epoch_;
  write_outputs(stats);
  return stats;
}

void Trainer::write_outputs(const EpochStats& stats) {
  if (config_.output_dir.empty()) return;
  std::filesystem::create_directories(config_.output_dir);
  {
    std::ofstream log(config_.output_dir / "metrics.jsonl", std::ios::app);
    if (!log) throw std::runtime_error("cannot append to metrics.jsonl");
    log << to_json(stats).dump() << '\n';
  }
  if (epoch_ % config_.checkpoint_every == 0) {
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%04d.bin", epoch_);
    save_checkpoint(checkpoint(), config_.output_dir / "checkpoints" / name);
    save_state(config_.output_dir / "train_state.json");
  }
}

std::vector<EpochStats> Trainer::train(
    const std::function<void(const EpochStats&)>& on_epoch) {
  std::vector<EpochStats> all;
  while (epoch_ < config_.epochs) {
    all.push_back(run_epoch());
    if (on_epoch) on_epoch(all.back());
  }
  if (!config_.output_dir.empty()) {
    save_checkpoint(checkpoint(), config_.output_dir / "policy.bin");
    save_state(config_.output_dir / "train_state.json");
  }
  return all;
}

PolicyCheckpoint Trainer::checkpoint() const {
  PolicyCheckpoint c;
  c.spec = config_.arch;
  c.params = params_;
  c.metadata = {{"epoch", epoch_},
                {"seed", config_.seed},
                {"reward", config_.reward_name},
                {"v_max_lin", config_.env.v_max_lin},
                {"omega_max", config_.env.omega_max}};
  return c;
}

nlohmann::json Trainer::state_to_json() const {
  nlohmann::json envs = nlohmann::json::array();
  for (const Slot& s : slots_) {
    nlohmann::json vel = nlohmann::json::array();
    for (const VelocityCommand& v : s.velocities) vel.push_back({v.vx, v.vy, v.omega});
    envs.push_back({
        {"kind", env_kind_name(s.config.kind)},
        {"rng", s.rng.serialize()},
        {"pose", {s.state.pose.position.x, s.state.pose.position.y, s.state.pose.yaw}},
        {"target", {s.state.target.x, s.state.target.y}},
        {"measured_velocity",
         {s.state.measured_velocity.vx, s.state.measured_velocity.vy,
          s.state.measured_velocity.omega}},
        {"last_action", action_json(s.state.last_action)},
        {"second_last_action", action_json(s.state.second_last_action)},
        {"step_count", s.state.step_count},
        {"world", world_to_json(*s.state.world)},
        {"recurrent_h", s.recurrent.h},
        {"recurrent_c", s.recurrent.c},
        {"episode_start", s.episode_start},
        {"velocities", vel},
    });
  }
  return {{"version", kStateVersion},
          {"epoch", epoch_},
          {"seed", config_.seed},
          {"architecture", architecture_to_json(config_.arch)},
          {"n_envs", config_.hyper.n_envs},
          {"horizon", config_.hyper.horizon},
          {"params", params_},
          {"adam_m", adam_.m},
          {"adam_v", adam_.v},
          {"adam_step", adam_.step},
          {"rng", rng_.serialize()},
          {"envs", envs}};
}

void Trainer::save_state(const std::filesystem::path& path) const {
  write_text_atomic(path, state_to_json().dump());
}

Trainer Trainer::resume(TrainConfig config, const std::filesystem::path& state_file) {
  std::ifstream f(state_file);
  if (!f) throw std::runtime_error("cannot open " + state_file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed train state " + state_file.string() + ": " +
                             e.what());
  }
  if (doc.at("version").get<int>() != kStateVersion) {
    throw std::runtime_error("unsupported train state version");
  }
  if (architecture_from_json(doc.at("architecture")).name != config.arch.name ||
      doc.at("architecture") != architecture_to_json(config.arch)) {
    throw ConfigurationError("train state architecture differs from config");
  }
  if (doc.at("n_envs").get<int>() != config.hyper.n_envs ||
      doc.at("horizon").get<int>() != config.hyper.horizon) {
    throw ConfigurationError("train state batch geometry differs from config");
  }

  Trainer t(std::move(config));
  t.epoch_ = doc.at("epoch").get<int>();
  t.params_ = doc.at("params").get<std::vector<double>>();
  if (t.params_.size() != t.network_.parameter_count()) {
    throw ConfigurationError("train state parameter count mismatch");
  }
  t.adam_.m = doc.at("adam_m").get<std::vector<double>>();
  t.adam_.v = doc.at("adam_v").get<std::vector<double>>();
  t.adam_.step = doc.at("adam_step").get<std::int64_t>();
  t.rng_.deserialize(doc.at("rng").get<std::string>());
  const auto& envs = doc.at("envs");
  if (envs.size() != t.slots_.size()) throw ConfigurationError("env count mismatch");
  for (std::size_t e = 0; e < t.slots_.size(); ++e) {
    const auto& j = envs[e];
    Slot& s = t.slots_[e];
    s.config.kind = parse_env_kind(j.at("kind").get<std::string>());
    s.rng.deserialize(j.at("rng").get<std::string>());
    const auto pose = j.at("pose").get<std::array<double, 3>>();
    s.state.pose = {{pose[0], pose[1]}, pose[2]};
    const auto target = j.at("target").get<std::array<double, 2>>();
    s.state.target = {target[0], target[1]};
    const auto mv = j.at("measured_velocity").get<std::array<double, 3>>();
    s.state.measured_velocity = {mv[0], mv[1], mv[2]};
    s.state.last_action = action_from(j.at("last_action"));
    s.state.second_last_action = action_from(j.at("second_last_action"));
    s.state.step_count = j.at("step_count").get<int>();
    s.state.world = std::make_shared<const WorldSpec>(world_from_json(j.at("world")));
    s.recurrent.h = j.at("recurrent_h").get<std::vector<double>>();
    s.recurrent.c = j.at("recurrent_c").get<std::vector<double>>();
    s.episode_start = j.at("episode_start").get<bool>();
    s.velocities.clear();
    for (const auto& v : j.at("velocities")) {
      const auto a = v.get<std::array<double, 3>>();
      s.velocities.push_back({a[0], a[1], a[2]});
    }
    s.observation = observe(s.state, s.config).observation;
  }
  return t;
}

}  // namespace shared_control
