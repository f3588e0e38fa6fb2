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

#include "shared_control/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shared_control {

std::optional<double> heading_metric(const UserInput& u) {
  if (u.ux == 0.0 && u.uy == 0.0) return std::nullopt;
  return std::abs(std::atan2(u.uy, u.ux));
}

std::vector<double> jerk_series(std::span<const VelocityCommand> v, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::vector<double> out;
  if (v.size() < 3) return out;
  const double inv = 1.0 / (dt * dt);
  out.reserve(v.size() - 2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double jx = (v[i + 1].vx - 2.0 * v[i].vx + v[i - 1].vx) * inv;
    const double jy = (v[i + 1].vy - 2.0 * v[i].vy + v[i - 1].vy) * inv;
    const double jw = (v[i + 1].omega - 2.0 * v[i].omega + v[i - 1].omega) * inv;
    out.push_back(std::sqrt(jx * jx + jy * jy + jw * jw));
  }
  return out;
}

std::optional<double> quantile(std::span<const double> values, double q) {
  if (values.empty()) return std::nullopt;
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must be in [0, 1]");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + (s[hi] - s[lo]) * frac;
}

std::optional<Quartiles> quartiles(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  Quartiles q;
  q.min = *quantile(values, 0.0);
  q.q1 = *quantile(values, 0.25);
  q.median = *quantile(values, 0.5);
  q.q3 = *quantile(values, 0.75);
  q.max = *quantile(values, 1.0);
  return q;
}

}  // namespace shared_control
