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

#include "shared_control/action.hpp"

#include <algorithm>
#include <cmath>

namespace shared_control {

SampledAction sample_action(std::span<const double, kActionSize> mean,
                            std::span<const double, kActionSize> log_std,
                            Rng& rng) {
  SampledAction out;
  for (int i = 0; i < kActionSize; ++i) {
    const double eps = rng.normal();
    out.pre_squash[i] = mean[i] + std::exp(log_std[i]) * eps;
    out.action[i] = std::tanh(out.pre_squash[i]);
  }
  return out;
}

ActionVector squashed_mean(std::span<const double, kActionSize> mean) {
  ActionVector a;
  for (int i = 0; i < kActionSize; ++i) a[i] = std::tanh(mean[i]);
  return a;
}

VelocityCommand scale_action(const ActionVector& a, double v_max_lin,
                             double omega_max) {
  return {a[0] * v_max_lin, a[1] * v_max_lin, a[2] * omega_max};
}

ActionVector normalize_command(const VelocityCommand& cmd, double v_max_lin,
                               double omega_max) {
  ActionVector a;
  a[0] = std::clamp(cmd.vx / v_max_lin, -1.0, 1.0);
  a[1] = std::clamp(cmd.vy / v_max_lin, -1.0, 1.0);
  a[2] = std::clamp(cmd.omega / omega_max, -1.0, 1.0);
  return a;
}

}  // namespace shared_control
