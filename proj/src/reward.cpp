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

#include "shared_control/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace shared_control {
namespace {

RewardWeights fc_lfc_weights() {
  RewardWeights w;
  w.r_c = -2.0;
  w.r_crit = -10.0;
  w.r_col = -100.0;
  w.r_h = -0.2;
  w.phi_thresh = 0.2;
  w.r_a = 0.5;
  w.r_l = -0.5;
  w.r_as = -0.02;
  return w;
}

RewardWeights clfc_weights() {
  RewardWeights w = fc_lfc_weights();
  w.r_c = -1.0;
  w.r_crit = -1.0;
  return w;
}

RewardWeights r2_weights() {
  RewardWeights w = clfc_weights();
  w.r_h = -0.5;
  w.r_vy = -1.6;
  return w;
}

double squared_norm(const ActionVector& a) {
  return a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
}

}  // namespace

void validate(const RewardWeights& w) {
  if (!(w.r_col < w.r_c && w.r_c <= 0.0)) {
    throw std::invalid_argument("reward weights require r_col < r_c <= 0");
  }
  if (!(w.r_a > 0.0)) throw std::invalid_argument("reward weights require r_a > 0");
  if (!(w.r_l < 0.0)) throw std::invalid_argument("reward weights require r_l < 0");
  if (!(w.phi_thresh >= 0.0)) {
    throw std::invalid_argument("reward weights require phi_thresh >= 0");
  }
}

RewardWeights reward_profile(std::string_view name) {
  if (name == "FC" || name == "LFC" || name == "FC_LFC") return fc_lfc_weights();
  if (name == "CLFC" || name == "CLFC_D" || name == "SCLFC_D_R1" || name == "R1") {
    return clfc_weights();
  }
  if (name == "SCLFC_D_R2" || name == "R2") return r2_weights();
  throw std::invalid_argument("unknown reward profile '" + std::string(name) + "'");
}

std::vector<std::string> reward_profile_names() {
  return {"FC",   "LFC",        "FC_LFC",     "CLFC", "CLFC_D",
          "SCLFC_D_R1", "R1", "SCLFC_D_R2", "R2"};
}

double obstacle_term(const LidarScan& scan, const RayThresholds& thresholds,
                     const RewardWeights& w) {
  bool collided = false;
  double critical = 0.0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double d = scan.ranges[i];
    if (d < thresholds.d_col[i]) {
      collided = true;
    } else if (d < thresholds.d_crit[i]) {
      const double gap = thresholds.d_crit[i] - d;
      const double penalty = w.r_c + w.r_crit * gap * gap;
      critical = w.aggregation == ObstacleAggregation::kSum
                     ? critical + penalty
                     : std::min(critical, penalty);
    }
  }
  return critical + (collided ? w.r_col : 0.0);
}

double obstacle_term(const LidarScan& scan, const CollisionCapsule& capsule,
                     const RewardWeights& w) {
  RayThresholds thresholds;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const CapsuleDistance d = capsule_threshold(capsule, scan.angle(i));
    thresholds.d_col.push_back(d.d_col);
    thresholds.d_crit.push_back(d.d_crit);
  }
  return obstacle_term(scan, thresholds, w);
}

double heading_term(double phi, const RewardWeights& w) {
  const double magnitude = std::abs(phi);
  return magnitude > w.phi_thresh ? w.r_h * magnitude * magnitude : 0.0;
}

std::pair<double, double> tracking_term(const ActionVector& v,
                                        const UserInput& u,
                                        const RewardWeights& w) {
  if (!w.r_vy) {
    const double ex = v[0] - u.ux;
    const double ey = v[1] - u.uy;
    return {w.r_a * std::exp(w.r_l * (ex * ex + ey * ey)), 0.0};
  }
  const double ex = v[0] - u.ux;
  return {w.r_a * std::exp(w.r_l * ex * ex), *w.r_vy * v[1] * v[1]};
}

std::pair<double, double> smoothing_terms(const ActionVector& a_t,
                                          const ActionVector& a_prev,
                                          const ActionVector& a_prev2,
                                          const RewardWeights& w) {
  ActionVector first;
  ActionVector second;
  for (int i = 0; i < kActionSize; ++i) {
    first[i] = a_t[i] - a_prev[i];
    second[i] = a_t[i] - 2.0 * a_prev[i] + a_prev2[i];
  }
  return {w.r_as * squared_norm(first), w.r_as * squared_norm(second)};
}

RewardBreakdown total_reward(const LidarScan& scan,
                             const RayThresholds& thresholds,
                             const ActionVector& a_t,
                             const ActionVector& a_prev,
                             const ActionVector& a_prev2, const UserInput& u,
                             double phi, const RewardWeights& w) {
  RewardBreakdown r;
  r.obstacles = obstacle_term(scan, thresholds, w);
  r.heading = heading_term(phi, w);
  std::tie(r.tracking, r.vy_penalty) = tracking_term(a_t, u, w);
  std::tie(r.smoothing_1, r.smoothing_2) =
      smoothing_terms(a_t, a_prev, a_prev2, w);
  r.total = r.sum_of_terms();
  return r;
}

}  // namespace shared_control
