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

#ifndef SHARED_CONTROL_TESTS_SUPPORT_PPO_FIXTURE_HPP_
#define SHARED_CONTROL_TESTS_SUPPORT_PPO_FIXTURE_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "shared_control/ppo.hpp"
#include "shared_control/rng.hpp"

namespace shared_control::testing_support {

// Synthetic rollout generated by `params`, with random rewards, values and
// episode boundaries.
struct Fixture {
  PolicyNetwork net;
  std::vector<double> params;
  RolloutBuffer buffer;
  GaeResult gae;
  PPOHyperparams h;

  Fixture(const std::string& arch, int n_envs, int horizon, int chunk, std::uint64_t seed)
      : net(architecture(arch)) {
    Rng rng(seed);
    params = net.initialize(rng, -0.5);
    for (double& p : params) p += 0.05 * rng.normal();
    const int units = net.recurrent_units();
    buffer = RolloutBuffer(n_envs, horizon, net.input_size(), units, units > 0 ? chunk : 1);
    h.n_envs = n_envs;
    h.horizon = horizon;
    h.bptt_chunk = chunk;
    const auto log_std = net.log_std(params);
    for (int e = 0; e < n_envs; ++e) {
      RecurrentState state = net.initial_state();
      for (int t = 0; t < horizon; ++t) {
        const std::size_t i = buffer.index(e, t);
        if (units > 0 && t % chunk == 0) {
          const std::size_t off = (static_cast<std::size_t>(e) * buffer.chunks_per_env() +
                                   t / chunk) * units;
          std::copy(state.h.begin(), state.h.end(), buffer.chunk_h.begin() + off);
          std::copy(state.c.begin(), state.c.end(), buffer.chunk_c.begin() + off);
        }
        buffer.episode_starts[i] = t == 0 || rng.uniform() < 0.2;
        if (buffer.episode_starts[i]) state.reset();
        double* obs = buffer.observations.data() + i * buffer.observation_size;
        for (int k = 0; k < buffer.observation_size; ++k) obs[k] = rng.uniform(-1, 1);
        const PolicyOutput out = net.forward(
            params, std::span<const double>(obs, buffer.observation_size), state);
        state = out.state;
        double* pre = buffer.pre_squash.data() + i * kActionSize;
        for (int j = 0; j < kActionSize; ++j) {
          pre[j] = out.mean[j] + std::exp(log_std[j]) * rng.normal();
        }
        buffer.log_probs[i] =
            gaussian_log_prob(std::span<const double, kActionSize>(pre, kActionSize), out.mean,
                              log_std);
        buffer.values[i] = rng.uniform(-1, 1);
        buffer.rewards[i] = rng.uniform(-1, 1);
        buffer.dones[i] = rng.uniform() < 0.1;
      }
      buffer.bootstrap_values[e] = rng.uniform(-1, 1);
    }
    gae = compute_gae(buffer.rewards, buffer.values, buffer.dones, buffer.bootstrap_values,
                      n_envs, horizon, h.gamma, h.gae_lambda);
  }

  std::vector<std::size_t> all_units() const {
    std::vector<std::size_t> u(buffer.n_envs * buffer.chunks_per_env());
    std::iota(u.begin(), u.end(), std::size_t{0});
    return u;
  }
};

}  // namespace shared_control::testing_support

#endif  // SHARED_CONTROL_TESTS_SUPPORT_PPO_FIXTURE_HPP_
