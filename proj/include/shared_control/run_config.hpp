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

// Run configuration document. Every field is optional:
//
//   {
//     "seed": 7,
//     "arch": "FC",
//     "reward": "FC_LFC",
//     "reward_profiles": {"mine": {"r_c": -1, "r_crit": -1, "r_col": -100,
//                                  "r_h": -0.2, "phi_thresh": 0.2, "r_a": 0.5,
//                                  "r_l": -0.5, "r_as": -0.02, "r_vy": -1.6,
//                                  "aggregation": "sum"}},
//     "envs": "a,b,c",
//     "epochs": 300,
//     "stage_one_epochs": 50,
//     "checkpoint_every": 50,
//     "hyperparams": {"learning_rate": 5e-4, "n_envs": 128, ...},
//     "env": {"v_max_lin": 1, "omega_max": 1, "max_steps": 1200,
//             "goal_radius": 0.3, "dt": 0.025},
//     "randomization": {"box_length": [1, 4], "box_width": [1, 2],
//                       "door_width": [0.9, 1.75], "box_start_gap": [1, 3]},
//     "scenarios": "all",
//     "output_dir": "runs/fc"
//   }
//
// Profiles under "reward_profiles" take precedence over built-in names.
// Omitted reward weights default to the built-in profile named by "base"
// (CLFC when absent).

#ifndef SHARED_CONTROL_RUN_CONFIG_HPP_
#define SHARED_CONTROL_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "shared_control/trainer.hpp"

namespace shared_control {

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "SHARED_CONTROL_OUT";

struct RunConfig {
  std::uint64_t seed = 0;
  std::string arch = "FC";
  std::string reward = "FC_LFC";
  std::map<std::string, RewardWeights> reward_profiles;
  std::string envs = "a";
  int epochs = 300;
  int stage_one_epochs = kCurriculumStageOneEpochs;
  int checkpoint_every = 50;
  PPOHyperparams hyper;
  EnvConfig env;
  std::string scenarios = "all";
  std::filesystem::path output_dir;
};

// Throws std::invalid_argument on unknown keys or ill-typed values.
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

RewardWeights reward_weights_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RewardWeights& weights);

// Config-defined profile first, then built-in names.
RewardWeights resolve_reward(const RunConfig& config);

// Explicit directory, else $SHARED_CONTROL_OUT, else "runs/<arch>_seed<seed>".
std::filesystem::path resolve_output_dir(const RunConfig& config);

// Resolves names and validates; throws std::invalid_argument or
// ConfigurationError.
TrainConfig to_train_config(const RunConfig& config);

}  // namespace shared_control

#endif  // SHARED_CONTROL_RUN_CONFIG_HPP_
