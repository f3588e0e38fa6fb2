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

#ifndef SHARED_CONTROL_OBSERVATION_HPP_
#define SHARED_CONTROL_OBSERVATION_HPP_

#include <span>
#include <vector>

#include "shared_control/action.hpp"
#include "shared_control/geometry.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

// Entries after the LiDAR block: user input (2), measured velocity (3), last
// action (3), second-to-last action (3).
inline constexpr int kProprioceptiveSize = 11;

// Flat policy input laid out as
//   [ranges / max_range (n) | ux uy | vx vy omega (normalized) | a_{t-1} | a_{t-2}]
struct ObservationVector {
  std::vector<double> values;
  int n_rays = 0;

  std::span<const double> lidar() const { return {values.data(), size_t(n_rays)}; }
  std::span<const double> proprioceptive() const {
    return {values.data() + n_rays, size_t(kProprioceptiveSize)};
  }
  std::size_t size() const { return values.size(); }
};

inline constexpr int observation_size(int n_rays) {
  return n_rays + kProprioceptiveSize;
}

ObservationVector assemble_observation(const LidarScan& scan, double max_range,
                                       const UserInput& u,
                                       const VelocityCommand& measured,
                                       double v_max_lin, double omega_max,
                                       const ActionVector& last_action,
                                       const ActionVector& second_last_action);

}  // namespace shared_control

#endif  // SHARED_CONTROL_OBSERVATION_HPP_
