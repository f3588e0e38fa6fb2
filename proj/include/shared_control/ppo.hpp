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

// Clipped-objective PPO with GAE. Recurrent policies are trained with
// truncated BPTT over fixed-length chunks whose initial hidden state is
// recorded during collection.

#ifndef SHARED_CONTROL_PPO_HPP_
#define SHARED_CONTROL_PPO_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "shared_control/action.hpp"
#include "shared_control/network.hpp"
#include "shared_control/rng.hpp"

namespace shared_control {

struct PPOHyperparams {
  double learning_rate = 5e-4;
  double entropy_coef = 1e-2;
  double eps_clip = 0.2;
  int horizon = 128;
  int minibatch_size = 4096;
  int mini_epochs = 4;
  int n_envs = 128;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;
  int bptt_chunk = 16;
  double log_std_floor = -5.0;
  double initial_log_std = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

// Throws std::invalid_argument when the batch does not split evenly.
void validate(const PPOHyperparams& h, bool recurrent);

// Transitions stored env-major: index = env * horizon + t.
struct RolloutBuffer {
  int n_envs = 0;
  int horizon = 0;
  int observation_size = 0;
  int recurrent_units = 0;
  int chunk = 1;

  std::vector<double> observations;    // [index][observation_size]
  std::vector<double> pre_squash;      // [index][3], Gaussian sample
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> episode_starts;  // recurrent state zeroed before t
  std::vector<double> chunk_h;         // [env][chunk][units]
  std::vector<double> chunk_c;
  std::vector<double> bootstrap_values;  // value after the last step, per env

  RolloutBuffer() = default;
  RolloutBuffer(int n_envs, int horizon, int observation_size,
                int recurrent_units, int chunk);

  std::size_t size() const { return static_cast<std::size_t>(n_envs) * horizon; }
  std::size_t index(int env, int t) const {
    return static_cast<std::size_t>(env) * horizon + t;
  }
  int chunks_per_env() const { return horizon / chunk; }
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma * v_{t+1} * (1 - done_t) - v_t
// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// Unnormalized; PPO normalizes per minibatch.
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const std::uint8_t> dones,
                      std::span<const double> bootstrap_values, int n_envs,
                      int horizon, double gamma, double lambda);

double gaussian_log_prob(std::span<const double, kActionSize> sample,
                         std::span<const double, kActionSize> mean,
                         std::span<const double, kActionSize> log_std);

double gaussian_entropy(std::span<const double, kActionSize> log_std);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double eps_clip);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, const PPOHyperparams& h);

// Rescales grad in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  std::size_t samples = 0;
};

// A training unit is one transition (feed-forward) or one BPTT chunk
// (recurrent). Returns the loss of the minibatch and accumulates its
// gradient into `grad` (if non-empty). Advantages are normalized over the
// minibatch when `normalize_advantages` is set.
LossStats minibatch_loss(const PolicyNetwork& network,
                         std::span<const double> params,
                         const RolloutBuffer& buffer, const GaeResult& gae,
                         std::span<const std::size_t> units,
                         const PPOHyperparams& h, std::span<double> grad,
                         bool normalize_advantages = true);

struct UpdateStats {
  LossStats last;
  double mean_policy_loss = 0.0;
  double mean_value_loss = 0.0;
  double mean_entropy = 0.0;
  double mean_clip_fraction = 0.0;
  double mean_grad_norm = 0.0;
  int gradient_steps = 0;
  // How often each transition took part in an update.
  std::vector<int> visits;
};

// mini_epochs passes over shuffled minibatches; throws NumericError on a
// non-finite loss.
UpdateStats ppo_update(const PolicyNetwork& network, std::vector<double>& params,
                       AdamState& adam, const RolloutBuffer& buffer,
                       const GaeResult& gae, const PPOHyperparams& h, Rng& rng);

}  // namespace shared_control

#endif  // SHARED_CONTROL_PPO_HPP_
