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

#include "shared_control/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace shared_control {
namespace {

using nlohmann::json;

void check_keys(const json& doc, const std::set<std::string>& allowed, const char* where) {
  if (!doc.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

Interval read_interval(const json& j, const char* key) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2 || !(v[0] <= v[1])) {
    throw std::invalid_argument(std::string("randomization '") + key + "' must be [lo, hi]");
  }
  return {v[0], v[1]};
}

}  // namespace

RewardWeights reward_weights_from_json(const json& doc) {
  check_keys(doc,
             {"base", "r_c", "r_crit", "r_col", "r_h", "phi_thresh", "r_a", "r_l", "r_as",
              "r_vy", "aggregation"},
             "reward profile");
  RewardWeights w = reward_profile(doc.value("base", std::string("CLFC")));
  read(doc, "r_c", w.r_c);
  read(doc, "r_crit", w.r_crit);
  read(doc, "r_col", w.r_col);
  read(doc, "r_h", w.r_h);
  read(doc, "phi_thresh", w.phi_thresh);
  read(doc, "r_a", w.r_a);
  read(doc, "r_l", w.r_l);
  read(doc, "r_as", w.r_as);
  if (doc.contains("r_vy")) {
    if (doc.at("r_vy").is_null()) {
      w.r_vy.reset();
    } else {
      double v = 0.0;
      read(doc, "r_vy", v);
      w.r_vy = v;
    }
  }
  if (doc.contains("aggregation")) {
    const std::string a = doc.at("aggregation").get<std::string>();
    if (a == "sum") {
      w.aggregation = ObstacleAggregation::kSum;
    } else if (a == "worst_ray") {
      w.aggregation = ObstacleAggregation::kWorstRay;
    } else {
      throw std::invalid_argument("aggregation must be 'sum' or 'worst_ray'");
    }
  }
  validate(w);
  return w;
}

json to_json(const RewardWeights& w) {
  json j = {{"r_c", w.r_c},   {"r_crit", w.r_crit},         {"r_col", w.r_col},
            {"r_h", w.r_h},   {"phi_thresh", w.phi_thresh}, {"r_a", w.r_a},
            {"r_l", w.r_l},   {"r_as", w.r_as},
            {"aggregation", w.aggregation == ObstacleAggregation::kSum ? "sum" : "worst_ray"}};
  j["r_vy"] = w.r_vy ? json(*w.r_vy) : json(nullptr);
  return j;
}

RunConfig run_config_from_json(const json& doc) {
  check_keys(doc,
             {"seed", "arch", "reward", "reward_profiles", "envs", "epochs", "stage_one_epochs",
              "checkpoint_every", "hyperparams", "env", "randomization", "scenarios",
              "output_dir"},
             "run config");
  RunConfig c;
  read(doc, "seed", c.seed);
  read(doc, "arch", c.arch);
  read(doc, "reward", c.reward);
  if (doc.contains("reward_profiles")) {
    for (const auto& [name, profile] : doc.at("reward_profiles").items()) {
      c.reward_profiles[name] = reward_weights_from_json(profile);
    }
  }
  if (doc.contains("envs")) {
    const json& e = doc.at("envs");
    if (e.is_array()) {
      c.envs.clear();
      for (const auto& item : e) {
        if (!c.envs.empty()) c.envs += ',';
        c.envs += item.get<std::string>();
      }
    } else {
      read(doc, "envs", c.envs);
    }
  }
  read(doc, "epochs", c.epochs);
  read(doc, "stage_one_epochs", c.stage_one_epochs);
  read(doc, "checkpoint_every", c.checkpoint_every);
  if (doc.contains("hyperparams")) {
    const json& h = doc.at("hyperparams");
    check_keys(h,
               {"learning_rate", "entropy_coef", "eps_clip", "horizon", "minibatch_size",
                "mini_epochs", "n_envs", "gamma", "gae_lambda", "value_coef",
                "max_grad_norm", "bptt_chunk", "log_std_floor", "initial_log_std"},
               "hyperparams");
    read(h, "learning_rate", c.hyper.learning_rate);
    read(h, "entropy_coef", c.hyper.entropy_coef);
    read(h, "eps_clip", c.hyper.eps_clip);
    read(h, "horizon", c.hyper.horizon);
    read(h, "minibatch_size", c.hyper.minibatch_size);
    read(h, "mini_epochs", c.hyper.mini_epochs);
    read(h, "n_envs", c.hyper.n_envs);
    read(h, "gamma", c.hyper.gamma);
    read(h, "gae_lambda", c.hyper.gae_lambda);
    read(h, "value_coef", c.hyper.value_coef);
    read(h, "max_grad_norm", c.hyper.max_grad_norm);
    read(h, "bptt_chunk", c.hyper.bptt_chunk);
    read(h, "log_std_floor", c.hyper.log_std_floor);
    read(h, "initial_log_std", c.hyper.initial_log_std);
  }
  if (doc.contains("env")) {
    const json& e = doc.at("env");
    check_keys(e, {"v_max_lin", "omega_max", "max_steps", "goal_radius", "dt"}, "env");
    read(e, "v_max_lin", c.env.v_max_lin);
    read(e, "omega_max", c.env.omega_max);
    read(e, "max_steps", c.env.max_steps);
    read(e, "goal_radius", c.env.goal_radius);
    read(e, "dt", c.env.dt);
  }
  if (doc.contains("randomization")) {
    const json& r = doc.at("randomization");
    check_keys(r, {"box_length", "box_width", "door_width", "box_start_gap"},
               "randomization");
    RandomizationRanges& rr = c.env.ranges;
    if (r.contains("box_length")) rr.box_length = read_interval(r.at("box_length"), "box_length");
    if (r.contains("box_width")) rr.box_width = read_interval(r.at("box_width"), "box_width");
    if (r.contains("door_width")) rr.door_width = read_interval(r.at("door_width"), "door_width");
    if (r.contains("box_start_gap")) {
      rr.box_start_gap = read_interval(r.at("box_start_gap"), "box_start_gap");
    }
  }
  read(doc, "scenarios", c.scenarios);
  if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open run config " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed run config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

json to_json(const RunConfig& c) {
  json profiles = json::object();
  for (const auto& [name, w] : c.reward_profiles) profiles[name] = to_json(w);
  const PPOHyperparams& h = c.hyper;
  const RandomizationRanges& r = c.env.ranges;
  return {{"seed", c.seed},
          {"arch", c.arch},
          {"reward", c.reward},
          {"reward_profiles", profiles},
          {"envs", c.envs},
          {"epochs", c.epochs},
          {"stage_one_epochs", c.stage_one_epochs},
          {"checkpoint_every", c.checkpoint_every},
          {"hyperparams",
           {{"learning_rate", h.learning_rate},
            {"entropy_coef", h.entropy_coef},
            {"eps_clip", h.eps_clip},
            {"horizon", h.horizon},
            {"minibatch_size", h.minibatch_size},
            {"mini_epochs", h.mini_epochs},
            {"n_envs", h.n_envs},
            {"gamma", h.gamma},
            {"gae_lambda", h.gae_lambda},
            {"value_coef", h.value_coef},
            {"max_grad_norm", h.max_grad_norm},
            {"bptt_chunk", h.bptt_chunk},
            {"log_std_floor", h.log_std_floor},
            {"initial_log_std", h.initial_log_std}}},
          {"env",
           {{"v_max_lin", c.env.v_max_lin},
            {"omega_max", c.env.omega_max},
            {"max_steps", c.env.max_steps},
            {"goal_radius", c.env.goal_radius},
            {"dt", c.env.dt}}},
          {"randomization",
           {{"box_length", {r.box_length.lo, r.box_length.hi}},
            {"box_width", {r.box_width.lo, r.box_width.hi}},
            {"door_width", {r.door_width.lo, r.door_width.hi}},
            {"box_start_gap", {r.box_start_gap.lo, r.box_start_gap.hi}}}},
          {"scenarios", c.scenarios},
          {"output_dir", c.output_dir.string()}};
}

RewardWeights resolve_reward(const RunConfig& config) {
  const auto it = config.reward_profiles.find(config.reward);
  if (it != config.reward_profiles.end()) return it->second;
  return reward_profile(config.reward);
}

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::path("runs") / (config.arch + "_seed" + std::to_string(config.seed));
}

TrainConfig to_train_config(const RunConfig& config) {
  TrainConfig t;
  t.seed = config.seed;
  t.arch = architecture(config.arch);
  t.reward_name = config.reward;
  t.reward = resolve_reward(config);
  t.env_set = parse_env_set(config.envs);
  t.epochs = config.epochs;
  t.stage_one_epochs = config.stage_one_epochs;
  t.checkpoint_every = config.checkpoint_every;
  t.hyper = config.hyper;
  t.env = config.env;
  t.env.lidar.n_rays = t.arch.n_rays;
  t.output_dir = resolve_output_dir(config);
  validate(t);
  return t;
}

}  // namespace shared_control
