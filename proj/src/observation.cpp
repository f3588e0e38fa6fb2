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

#include "shared_control/observation.hpp"

#include <algorithm>

namespace shared_control {

ObservationVector assemble_observation(const LidarScan& scan, double max_range,
                                       const UserInput& u,
                                       const VelocityCommand& measured,
                                       double v_max_lin, double omega_max,
                                       const ActionVector& last_action,
                                       const ActionVector& second_last_action) {
  ObservationVector obs;
  obs.n_rays = static_cast<int>(scan.size());
  obs.values.reserve(scan.size() + kProprioceptiveSize);
  for (double d : scan.ranges) obs.values.push_back(d / max_range);
  obs.values.push_back(u.ux);
  obs.values.push_back(u.uy);
  obs.values.push_back(std::clamp(measured.vx / v_max_lin, -1.0, 1.0));
  obs.values.push_back(std::clamp(measured.vy / v_max_lin, -1.0, 1.0));
  obs.values.push_back(std::clamp(measured.omega / omega_max, -1.0, 1.0));
  for (double a : last_action.values) obs.values.push_back(a);
  for (double a : second_last_action.values) obs.values.push_back(a);
  return obs;
}

}  // namespace shared_control
