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

// Vectorized PPO training loop with the two-stage curriculum.
//
// Output directory layout (when configured):
//   metrics.jsonl               one record per epoch
//   checkpoints/epoch_NNNN.bin  policy checkpoint every checkpoint_every epochs
//   train_state.json            full resumable state, refreshed with checkpoints
//   policy.bin                  final policy

#ifndef SHARED_CONTROL_TRAINER_HPP_
#define SHARED_CONTROL_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shared_control/checkpoint.hpp"
#include "shared_control/environment.hpp"
#include "shared_control/network.hpp"
#include "shared_control/ppo.hpp"
#include "shared_control/reward.hpp"

namespace shared_control {

struct TrainConfig {
  std::uint64_t seed = 0;
  ArchitectureSpec arch = architecture("FC");
  std::string reward_name = "FC_LFC";
  RewardWeights reward = reward_profile("FC_LFC");
  std::vector<EnvKind> env_set = {EnvKind::kEmpty};
  int epochs = 300;
  int stage_one_epochs = kCurriculumStageOneEpochs;
  PPOHyperparams hyper;
  EnvConfig env;  // template; kind is set per environment slot
  int checkpoint_every = 50;
  std::filesystem::path output_dir;  // empty: no files written
};

void validate(const TrainConfig& config);

struct EpochStats {
  int epoch = 0;
  std::size_t transitions = 0;
  double mean_reward = 0.0;
  double mean_tracking = 0.0;
  int episodes = 0;  // finished during this epoch
  int collisions = 0;
  int goals = 0;
  int timeouts = 0;
  double collision_rate = 0.0;
  double goal_rate = 0.0;
  double mean_phi = 0.0;
  double mean_jerk = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

nlohmann::json to_json(const EpochStats& stats);

class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  // Restores the state written by save_state. The config must name the same
  // architecture and batch geometry.
  static Trainer resume(TrainConfig config, const std::filesystem::path& state_file);

  // One collection + update cycle. Appends to metrics.jsonl and writes
  // checkpoints when an output directory is configured.
  EpochStats run_epoch();

  // Runs until config.epochs; writes policy.bin at the end.
  std::vector<EpochStats> train(
      const std::function<void(const EpochStats&)>& on_epoch = {});

  // Collects one rollout with the current parameters without updating.
  const RolloutBuffer& collect_rollouts(EpochStats& stats);

  int epoch() const { return epoch_; }
  const TrainConfig& config() const { return config_; }
  const PolicyNetwork& network() const { return network_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& mutable_params() { return params_; }
  const RolloutBuffer& buffer() const { return buffer_; }

  PolicyCheckpoint checkpoint() const;
  nlohmann::json state_to_json() const;
  void save_state(const std::filesystem::path& path) const;

 private:
  struct Slot {
    EnvConfig config;
    EpisodeState state;
    Rng rng;
    RecurrentState recurrent;
    ObservationVector observation;
    bool episode_start = true;
    std::vector<VelocityCommand> velocities;  // last two of this episode
  };

  void apply_curriculum();
  void reset_slot(Slot& slot);
  void write_outputs(const EpochStats& stats);

  TrainConfig config_;
  PolicyNetwork network_;
  std::vector<double> params_;
  AdamState adam_;
  Rng rng_;
  int epoch_ = 0;
  std::vector<Slot> slots_;
  RayThresholds thresholds_;
  RolloutBuffer buffer_;
};

}  // namespace shared_control

#endif  // SHARED_CONTROL_TRAINER_HPP_
