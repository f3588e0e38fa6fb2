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

#include "shared_control/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shared_control {
namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 * log(2 pi)

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const PPOHyperparams& h, bool recurrent) {
  require(h.learning_rate > 0.0, "learning_rate must be positive");
  require(h.entropy_coef >= 0.0, "entropy_coef must be non-negative");
  require(h.eps_clip > 0.0 && h.eps_clip < 1.0, "eps_clip must be in (0, 1)");
  require(h.horizon > 0, "horizon must be positive");
  require(h.n_envs > 0, "n_envs must be positive");
  require(h.minibatch_size > 0, "minibatch_size must be positive");
  require(h.mini_epochs > 0, "mini_epochs must be positive");
  require(h.gamma >= 0.0 && h.gamma <= 1.0, "gamma must be in [0, 1]");
  require(h.gae_lambda >= 0.0 && h.gae_lambda <= 1.0, "gae_lambda must be in [0, 1]");
  require(h.value_coef >= 0.0, "value_coef must be non-negative");
  require(h.max_grad_norm > 0.0, "max_grad_norm must be positive");
  const long total = static_cast<long>(h.n_envs) * h.horizon;
  require(total % h.minibatch_size == 0,
          "n_envs * horizon (" + std::to_string(total) +
              ") must be a multiple of minibatch_size (" +
              std::to_string(h.minibatch_size) + ")");
  if (recurrent) {
    require(h.bptt_chunk > 0, "bptt_chunk must be positive");
    require(h.horizon % h.bptt_chunk == 0, "horizon must be a multiple of bptt_chunk");
    require(h.minibatch_size % h.bptt_chunk == 0,
            "minibatch_size must be a multiple of bptt_chunk");
  }
}

RolloutBuffer::RolloutBuffer(int n_envs_in, int horizon_in, int observation_size_in,
                             int recurrent_units_in, int chunk_in)
    : n_envs(n_envs_in),
      horizon(horizon_in),
      observation_size(observation_size_in),
      recurrent_units(recurrent_units_in),
      chunk(recurrent_units_in > 0 ? chunk_in : 1) {
  const std::size_t n = size();
  observations.assign(n * observation_size, 0.0);
  pre_squash.assign(n * kActionSize, 0.0);
  log_probs.assign(n, 0.0);
  values.assign(n, 0.0);
  rewards.assign(n, 0.0);
  dones.assign(n, 0);
  episode_starts.assign(n, 0);
  if (recurrent_units > 0) {
    const std::size_t states =
        static_cast<std::size_t>(n_envs) * chunks_per_env() * recurrent_units;
    chunk_h.assign(states, 0.0);
    chunk_c.assign(states, 0.0);
  }
  bootstrap_values.assign(n_envs, 0.0);
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones,
                      std::span<const double> bootstrap_values, int n_envs,
                      int horizon, double gamma, double lambda) {
  const std::size_t n = static_cast<std::size_t>(n_envs) * horizon;
  if (rewards.size() != n || values.size() != n || dones.size() != n ||
      bootstrap_values.size() != static_cast<std::size_t>(n_envs)) {
    throw std::invalid_argument("compute_gae: inconsistent buffer sizes");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  for (int e = 0; e < n_envs; ++e) {
    double next_adv = 0.0;
    double next_value = bootstrap_values[e];
    for (int t = horizon - 1; t >= 0; --t) {
      const std::size_t i = static_cast<std::size_t>(e) * horizon + t;
      const double live = dones[i] ? 0.0 : 1.0;
      const double delta = rewards[i] + gamma * next_value * live - values[i];
      next_adv = delta + gamma * lambda * live * next_adv;
      out.advantages[i] = next_adv;
      out.returns[i] = next_adv + values[i];
      next_value = values[i];
    }
  }
  return out;
}

double gaussian_log_prob(std::span<const double, kActionSize> sample,
                         std::span<const double, kActionSize> mean,
                         std::span<const double, kActionSize> log_std) {
  double lp = 0.0;
  for (int j = 0; j < kActionSize; ++j) {
    const double z = (sample[j] - mean[j]) * std::exp(-log_std[j]);
    lp += -0.5 * z * z - log_std[j] - kHalfLogTwoPi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double, kActionSize> log_std) {
  double h = 0.0;
  for (int j = 0; j < kActionSize; ++j) h += log_std[j] + 0.5 + kHalfLogTwoPi;
  return h;
}

double clipped_surrogate(double ratio, double advantage, double eps_clip) {
  const double clipped = std::clamp(ratio, 1.0 - eps_clip, 1.0 + eps_clip);
  return std::min(ratio * advantage, clipped * advantage);
}

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, const PPOHyperparams& h) {
  if (state.m.size() != params.size()) {
    state = AdamState(params.size());
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.adam_beta1, t);
  const double c2 = 1.0 - std::pow(h.adam_beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = h.adam_beta1 * state.m[i] + (1.0 - h.adam_beta1) * grad[i];
    state.v[i] = h.adam_beta2 * state.v[i] + (1.0 - h.adam_beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.adam_epsilon);
  }
}

double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
  return norm;
}

LossStats minibatch_loss(const PolicyNetwork& network, std::span<const double> params,
                         const RolloutBuffer& buffer, const GaeResult& gae,
                         std::span<const std::size_t> units, const PPOHyperparams& h,
                         std::span<double> grad, bool normalize_advantages) {
  const int chunk = buffer.chunk;
  const int chunks_per_env = buffer.chunks_per_env();
  const bool recurrent = buffer.recurrent_units > 0;
  const int hu = buffer.recurrent_units;
  const bool want_grad = !grad.empty();

  // Transition indices in unit order.
  std::vector<std::size_t> samples;
  samples.reserve(units.size() * chunk);
  for (std::size_t u : units) {
    const int env = static_cast<int>(u / chunks_per_env);
    const int c = static_cast<int>(u % chunks_per_env);
    for (int t = 0; t < chunk; ++t) samples.push_back(buffer.index(env, c * chunk + t));
  }
  const double batch = static_cast<double>(samples.size());

  double adv_mean = 0.0;
  double adv_scale = 1.0;
  if (normalize_advantages) {
    for (std::size_t i : samples) adv_mean += gae.advantages[i];
    adv_mean /= batch;
    double var = 0.0;
    for (std::size_t i : samples) {
      const double d = gae.advantages[i] - adv_mean;
      var += d * d;
    }
    adv_scale = 1.0 / (std::sqrt(var / batch) + 1e-8);
  }

  const auto log_std = network.log_std(params);
  const std::size_t log_std_offset = network.parameter_count() - kActionSize;
  std::array<double, kActionSize> inv_var{};
  for (int j = 0; j < kActionSize; ++j) inv_var[j] = std::exp(-2.0 * log_std[j]);

  LossStats stats;
  stats.samples = samples.size();
  std::vector<ForwardCache> caches(chunk);
  std::vector<OutputGradient> upstream(chunk);

  std::size_t cursor = 0;
  for (std::size_t u : units) {
    const int env = static_cast<int>(u / chunks_per_env);
    const int c = static_cast<int>(u % chunks_per_env);
    RecurrentState state = network.initial_state();
    if (recurrent) {
      const std::size_t off =
          (static_cast<std::size_t>(env) * chunks_per_env + c) * hu;
      std::copy_n(buffer.chunk_h.begin() + off, hu, state.h.begin());
      std::copy_n(buffer.chunk_c.begin() + off, hu, state.c.begin());
    }
    for (int t = 0; t < chunk; ++t, ++cursor) {
      const std::size_t i = samples[cursor];
      if (recurrent && buffer.episode_starts[i]) state.reset();
      const std::span<const double> obs(
          buffer.observations.data() + i * buffer.observation_size,
          buffer.observation_size);
      PolicyOutput out =
          network.forward(params, obs, state, want_grad ? &caches[t] : nullptr);
      state = std::move(out.state);

      const std::span<const double, kActionSize> sample(
          buffer.pre_squash.data() + i * kActionSize, kActionSize);
      const double logp = gaussian_log_prob(sample, out.mean, log_std);
      const double ratio = std::exp(logp - buffer.log_probs[i]);
      const double adv = (gae.advantages[i] - adv_mean) * adv_scale;
      const double unclipped = ratio * adv;
      const double clipped =
          std::clamp(ratio, 1.0 - h.eps_clip, 1.0 + h.eps_clip) * adv;
      const double surrogate = std::min(unclipped, clipped);
      const double v_err = out.value - gae.returns[i];

      stats.policy_loss -= surrogate / batch;
      stats.value_loss += v_err * v_err / batch;
      stats.approx_kl += (buffer.log_probs[i] - logp) / batch;
      stats.mean_ratio += ratio / batch;
      if (std::abs(ratio - 1.0) > h.eps_clip) stats.clip_fraction += 1.0 / batch;

      if (want_grad) {
        OutputGradient& g = upstream[t];
        g.d_h.clear();
        g.d_c.clear();
        // The clipped branch is constant in the parameters.
        const double d_logp = unclipped <= clipped ? -unclipped / batch : 0.0;
        for (int j = 0; j < kActionSize; ++j) {
          const double diff = sample[j] - out.mean[j];
          g.d_mean[j] = d_logp * diff * inv_var[j];
          grad[log_std_offset + j] += d_logp * (diff * diff * inv_var[j] - 1.0);
        }
        g.d_value = 2.0 * h.value_coef * v_err / batch;
      }
    }

    if (want_grad) {
      RecurrentState carry(0);
      for (int t = chunk - 1; t >= 0; --t) {
        const std::size_t i = samples[cursor - chunk + t];
        if (!carry.h.empty()) {
          upstream[t].d_h = std::move(carry.h);
          upstream[t].d_c = std::move(carry.c);
        }
        RecurrentState d_in(0);
        network.backward(params, caches[t], upstream[t], grad,
                         recurrent && t > 0 ? &d_in : nullptr);
        // A reset before step t cuts the gradient path to step t - 1.
        carry = (recurrent && !buffer.episode_starts[i]) ? std::move(d_in)
                                                          : RecurrentState(0);
      }
    }
  }

  stats.entropy = gaussian_entropy(log_std);
  if (want_grad) {
    for (int j = 0; j < kActionSize; ++j) grad[log_std_offset + j] -= h.entropy_coef;
  }
  return stats;
}

UpdateStats ppo_update(const PolicyNetwork& network, std::vector<double>& params,
                       AdamState& adam, const RolloutBuffer& buffer, const GaeResult& gae,
                       const PPOHyperparams& h, Rng& rng) {
  const std::size_t n_units = buffer.size() / buffer.chunk;
  const std::size_t units_per_batch =
      static_cast<std::size_t>(h.minibatch_size) / buffer.chunk;
  if (units_per_batch == 0 || n_units % units_per_batch != 0) {
    throw std::invalid_argument("ppo_update: minibatch does not divide the rollout");
  }
  const std::size_t log_std_offset = network.parameter_count() - kActionSize;

  UpdateStats out;
  out.visits.assign(buffer.size(), 0);
  std::vector<std::size_t> order(n_units);
  std::vector<double> grad(params.size());
  for (int epoch = 0; epoch < h.mini_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n_units; i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::size_t start = 0; start < n_units; start += units_per_batch) {
      const std::span<const std::size_t> units(order.data() + start, units_per_batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      const LossStats s = minibatch_loss(network, params, buffer, gae, units, h, grad);
      const double total = s.policy_loss + h.value_coef * s.value_loss -
                           h.entropy_coef * s.entropy;
      if (!std::isfinite(total)) {
        throw NumericError("non-finite PPO loss (policy " + std::to_string(s.policy_loss) +
                           ", value " + std::to_string(s.value_loss) + ")");
      }
      const double norm = clip_grad_norm(grad, h.max_grad_norm);
      if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
      adam_step(params, grad, adam, h);
      for (int j = 0; j < kActionSize; ++j) {
        double& ls = params[log_std_offset + j];
        ls = std::max(ls, h.log_std_floor);
      }
      for (std::size_t u : units) {
        const int env = static_cast<int>(u / buffer.chunks_per_env());
        const int c = static_cast<int>(u % buffer.chunks_per_env());
        for (int t = 0; t < buffer.chunk; ++t) {
          ++out.visits[buffer.index(env, c * buffer.chunk + t)];
        }
      }
      out.last = s;
      out.mean_policy_loss += s.policy_loss;
      out.mean_value_loss += s.value_loss;
      out.mean_entropy += s.entropy;
      out.mean_clip_fraction += s.clip_fraction;
      out.mean_grad_norm += norm;
      ++out.gradient_steps;
    }
  }
  if (out.gradient_steps > 0) {
    const double n = out.gradient_steps;
    out.mean_policy_loss /= n;
    out.mean_value_loss /= n;
    out.mean_entropy /= n;
    out.mean_clip_fraction /= n;
    out.mean_grad_norm /= n;
  }
  return out;
}

}  // namespace shared_control
