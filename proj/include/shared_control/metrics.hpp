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

// Heading and jerk metrics plus order statistics.

#ifndef SHARED_CONTROL_METRICS_HPP_
#define SHARED_CONTROL_METRICS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "shared_control/geometry.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

// |atan2(uy, ux)| in [0, pi]; nullopt for zero input.
std::optional<double> heading_metric(const UserInput& u);

// Second central difference of each velocity component over dt^2, combined
// with the Euclidean norm. One value per interior sample; empty for fewer
// than three samples. Throws std::invalid_argument unless dt > 0.
std::vector<double> jerk_series(std::span<const VelocityCommand> velocities, double dt);

struct Quartiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Linear interpolation between order statistics; nullopt for empty input.
std::optional<double> quantile(std::span<const double> values, double q);
std::optional<Quartiles> quartiles(std::span<const double> values);

}  // namespace shared_control

#endif  // SHARED_CONTROL_METRICS_HPP_
