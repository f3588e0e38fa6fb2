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

// Trajectory log, one whitespace separated record per simulation step:
//
//   # shared_control trajectory 1
//   # key=value ...                      (scenario, policy, dt, limits, ...)
//   # columns step t x y yaw cmd_vx cmd_vy cmd_omega meas_vx meas_vy
//     meas_omega ux uy scan_min scan_digest r_obstacles r_heading
//     r_tracking r_vy r_smooth1 r_smooth2 r_total collision critical
//   1 0.025 ...
//
// Record k describes step k: the command applied, the resulting pose and
// user input, and the reward of that step. Reals are printed with 17
// significant digits so a log reads back bit-exactly. scan_digest is the
// FNV-1a hash of the raw range bits in hex.

#ifndef SHARED_CONTROL_TRAJECTORY_LOG_HPP_
#define SHARED_CONTROL_TRAJECTORY_LOG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "shared_control/geometry.hpp"
#include "shared_control/reward.hpp"
#include "shared_control/user_model.hpp"

namespace shared_control {

inline constexpr int kTrajectoryLogVersion = 1;

struct TrajectoryRecord {
  int step = 0;
  double t = 0.0;
  Pose2D pose;
  VelocityCommand commanded;
  VelocityCommand measured;
  UserInput user_input;
  double scan_min = 0.0;
  std::uint64_t scan_digest = 0;
  RewardBreakdown reward;
  bool collision = false;
  bool critical = false;
};

struct TrajectoryLog {
  // Ordered header fields; "dt" is required.
  std::map<std::string, std::string> header;
  std::vector<TrajectoryRecord> records;

  double dt() const;
};

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::uint64_t scan_digest(const LidarScan& scan);

void write_log(const TrajectoryLog& log, std::ostream& out);
void write_log(const TrajectoryLog& log, const std::filesystem::path& path);

// Throws LogFormatError for malformed lines, non-monotone time or a time
// step deviating from the header dt by more than 1e-9 s.
TrajectoryLog read_log(std::istream& in);
TrajectoryLog read_log(const std::filesystem::path& path);

// Checks fixed dt and monotone time; throws LogFormatError (line numbers
// count the three header lines).
void validate(const TrajectoryLog& log);

}  // namespace shared_control

#endif  // SHARED_CONTROL_TRAJECTORY_LOG_HPP_
