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

// Shared-control reward: obstacle proximity, heading, intent tracking and
// action smoothing, reported term by term.

#ifndef SHARED_CONTROL_REWARD_HPP_
#define SHARED_CONTROL_REWARD_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shared_control/action.hpp"
#include "shared_control/geometry.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

// How per-ray obstacle penalties combine into one term.
enum class ObstacleAggregation { kSum, kWorstRay };

struct RewardWeights {
  double r_c = -1.0;
  double r_crit = -1.0;
  double r_col = -100.0;
  double r_h = -0.2;
  double phi_thresh = 0.2;
  double r_a = 0.5;
  double r_l = -0.5;
  // Present: track only vx and punish vy (method 2). Absent: track the full
  // planar velocity (method 1).
  std::optional<double> r_vy;
  double r_as = -0.02;
  ObstacleAggregation aggregation = ObstacleAggregation::kSum;

  int method() const { return r_vy.has_value() ? 2 : 1; }
};

struct RewardBreakdown {
  double obstacles = 0.0;
  double heading = 0.0;
  double tracking = 0.0;
  double vy_penalty = 0.0;
  double smoothing_1 = 0.0;
  double smoothing_2 = 0.0;
  double total = 0.0;

  double sum_of_terms() const {
    return obstacles + heading + tracking + vy_penalty + smoothing_1 +
           smoothing_2;
  }
};

// Throws std::invalid_argument if the weights break r_col < r_c <= 0,
// r_a > 0, r_l < 0 or phi_thresh >= 0.
void validate(const RewardWeights& w);

// Built-in weight sets. Accepted names: FC, LFC, FC_LFC; CLFC, CLFC_D,
// SCLFC_D_R1, R1; SCLFC_D_R2, R2.
RewardWeights reward_profile(std::string_view name);
std::vector<std::string> reward_profile_names();

// Rays inside the collision zone contribute a single r_col per step; rays in
// the critical band contribute r_c + r_crit * (d_crit - d)^2 each.
double obstacle_term(const LidarScan& scan, const RayThresholds& thresholds,
                     const RewardWeights& w);
double obstacle_term(const LidarScan& scan, const CollisionCapsule& capsule,
                     const RewardWeights& w);

double heading_term(double phi, const RewardWeights& w);

// `v` is the normalized commanded velocity. Returns (tracking, vy_penalty).
std::pair<double, double> tracking_term(const ActionVector& v,
                                        const UserInput& u,
                                        const RewardWeights& w);

std::pair<double, double> smoothing_terms(const ActionVector& a_t,
                                          const ActionVector& a_prev,
                                          const ActionVector& a_prev2,
                                          const RewardWeights& w);

RewardBreakdown total_reward(const LidarScan& scan,
                             const RayThresholds& thresholds,
                             const ActionVector& a_t,
                             const ActionVector& a_prev,
                             const ActionVector& a_prev2, const UserInput& u,
                             double phi, const RewardWeights& w);

}  // namespace shared_control

#endif  // SHARED_CONTROL_REWARD_HPP_
