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

#ifndef SHARED_CONTROL_ACTION_HPP_
#define SHARED_CONTROL_ACTION_HPP_

#include <array>
#include <span>

#include "shared_control/geometry.hpp"
#include "shared_control/rng.hpp"

namespace shared_control {

inline constexpr int kActionSize = 3;

// Normalized command (vx, vy, omega), each component in [-1, 1]. Multiply by
// the platform limits to get a VelocityCommand.
struct ActionVector {
  std::array<double, kActionSize> values{};

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  bool operator==(const ActionVector&) const = default;
};

struct SampledAction {
  ActionVector action;                     // tanh(pre_squash)
  std::array<double, kActionSize> pre_squash{};
};

// Draws mean + exp(log_std) * eps per component and squashes with tanh.
// A log_std of -inf yields the squashed mean.
SampledAction sample_action(std::span<const double, kActionSize> mean,
                            std::span<const double, kActionSize> log_std,
                            Rng& rng);

// Deterministic action used at evaluation time.
ActionVector squashed_mean(std::span<const double, kActionSize> mean);

// Maps [-1, 1] to [-v_max, v_max] for vx, vy and [-omega_max, omega_max].
VelocityCommand scale_action(const ActionVector& a, double v_max_lin,
                             double omega_max);

// Inverse of scale_action, clamped to [-1, 1].
ActionVector normalize_command(const VelocityCommand& cmd, double v_max_lin,
                               double omega_max);

}  // namespace shared_control

#endif  // SHARED_CONTROL_ACTION_HPP_
