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

#include <cstdlib>

#include "shared_control/run_config.hpp"

namespace shared_control {
namespace {

using nlohmann::json;

TEST(RunConfig, DefaultsWhenEmpty) {
  const RunConfig c = run_config_from_json(json::object());
  EXPECT_EQ(c.arch, "FC");
  EXPECT_EQ(c.hyper.learning_rate, 5e-4);
  EXPECT_EQ(c.hyper.n_envs, 128);
  EXPECT_EQ(c.env.v_max_lin, 1.0);
  EXPECT_EQ(c.env.omega_max, 1.0);
}

TEST(RunConfig, UnknownKeysAreRejected) {
  EXPECT_THROW(run_config_from_json({{"archh", "FC"}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"hyperparams", {{"lr", 1e-3}}}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"env", {{"speed", 1}}}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"epochs", "ten"}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json(json::array()), std::invalid_argument);
}

TEST(RunConfig, FieldsAreRead) {
  const json doc = {{"seed", 7},
                    {"arch", "LFC"},
                    {"reward", "mine"},
                    {"reward_profiles", {{"mine", {{"r_c", -3.0}, {"base", "R2"}}}}},
                    {"envs", "a,b"},
                    {"epochs", 12},
                    {"hyperparams", {{"learning_rate", 1e-3}, {"n_envs", 16}}},
                    {"randomization", {{"door_width", {1.0, 1.5}}}}};
  const RunConfig c = run_config_from_json(doc);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.arch, "LFC");
  EXPECT_EQ(c.epochs, 12);
  EXPECT_EQ(c.hyper.learning_rate, 1e-3);
  EXPECT_EQ(c.hyper.n_envs, 16);
  const RewardWeights w = resolve_reward(c);
  EXPECT_EQ(w.r_c, -3.0);
  EXPECT_EQ(w.r_h, -0.5);
  EXPECT_EQ(w.r_vy, -1.6);
  // Round trip through JSON.
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(RunConfig, OutputDirResolution) {
  RunConfig c;
  c.arch = "LFC";
  c.seed = 3;
  unsetenv(kOutputDirEnv);
  EXPECT_EQ(resolve_output_dir(c), std::filesystem::path("runs") / "LFC_seed3");
  setenv(kOutputDirEnv, "/tmp/sc_out", 1);
  EXPECT_EQ(resolve_output_dir(c), std::filesystem::path("/tmp/sc_out"));
  c.output_dir = "/explicit";
  EXPECT_EQ(resolve_output_dir(c), std::filesystem::path("/explicit"));
  unsetenv(kOutputDirEnv);
}

TEST(RunConfig, TrainConfigValidation) {
  RunConfig c;
  c.arch = "NOPE";
  EXPECT_ANY_THROW(to_train_config(c));
  c.arch = "CLFC";
  c.reward = "unknown_profile";
  EXPECT_ANY_THROW(to_train_config(c));
  c.reward = "CLFC";
  EXPECT_NO_THROW(to_train_config(c));
}

}  // namespace
}  // namespace shared_control
