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

// Benchmark scenarios (a growing box and two doors, approached head-on or at
// 20 degrees), controllers and reports.
//
// Scenario frame: the target line runs along +x through the obstacle center
// at the origin. The start lies start_offset before the near face, rotated by
// the incident angle about the face center; the target lies target_offset
// behind the far face. The robot starts facing +x.

#ifndef SHARED_CONTROL_EVALUATION_HPP_
#define SHARED_CONTROL_EVALUATION_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shared_control/environment.hpp"
#include "shared_control/metrics.hpp"
#include "shared_control/network.hpp"
#include "shared_control/trajectory_log.hpp"

namespace shared_control {

enum class ScenarioKind { kBox, kDoor };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kBox;
  double box_length = 1.0;  // across the target line
  double box_width = 1.0;   // along the target line
  double door_width = 1.0;
  double incident_angle_deg = 0.0;
  double start_offset = 2.0;
  double target_offset = 2.0;
  double v_max_lin = 0.67;
  double omega_max = 2.0;

  std::string name() const;  // e.g. box_l2_a20, door_w1.25_a0
};

inline constexpr double kEvalVMaxLin = 0.67;
inline constexpr double kEvalOmegaMax = 2.0;

// Box lengths {1, 2, 4} (width 1) and doors {1.0, 1.25}, each at 0 and 20
// degrees.
std::vector<ScenarioSpec> scenario_grid(double v_max_lin = kEvalVMaxLin,
                                        double omega_max = kEvalOmegaMax);

// "all", or comma separated key:value filters over the grid, e.g.
// "box:4,angle:20", "door:1.25", "box" (all boxes). Throws
// std::invalid_argument for unknown keys or an empty selection.
std::vector<ScenarioSpec> select_scenarios(std::string_view filter,
                                           double v_max_lin = kEvalVMaxLin,
                                           double omega_max = kEvalOmegaMax);

struct ScenarioLayout {
  std::shared_ptr<const WorldSpec> world;
  Pose2D start;
  Vec2 target;
  double near_face_x = 0.0;
  double far_face_x = 0.0;
};

ScenarioLayout build_scenario(const ScenarioSpec& spec,
                              double arena_half_extent = 5.0);

// Maps the current observation to a normalized action.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;
  virtual int n_rays() const = 0;
  virtual void reset() {}
  virtual ActionVector act(const Observed& observed, const EnvConfig& config) = 0;
};

// Deterministic policy: squashed Gaussian mean with carried recurrent state.
class NetworkController : public Controller {
 public:
  NetworkController(std::string name, ArchitectureSpec spec, std::vector<double> params);
  std::string name() const override { return name_; }
  int n_rays() const override { return network_.spec().n_rays; }
  void reset() override { state_ = network_.initial_state(); }
  ActionVector act(const Observed& observed, const EnvConfig& config) override;

 private:
  std::string name_;
  PolicyNetwork network_;
  std::vector<double> params_;
  RecurrentState state_;
};

// Reactive Driving Support baseline on a 360-ray scan.
class RdsController : public Controller {
 public:
  explicit RdsController(double tau = 2.0, double heading_gain = 1.0, int n_rays = 360)
      : tau_(tau), heading_gain_(heading_gain), n_rays_(n_rays) {}
  std::string name() const override { return "rds"; }
  int n_rays() const override { return n_rays_; }
  ActionVector act(const Observed& observed, const EnvConfig& config) override;

 private:
  double tau_;
  double heading_gain_;
  int n_rays_;
};

class ZeroController : public Controller {
 public:
  explicit ZeroController(int n_rays = 36) : n_rays_(n_rays) {}
  std::string name() const override { return "zero"; }
  int n_rays() const override { return n_rays_; }
  ActionVector act(const Observed&, const EnvConfig&) override { return {}; }

 private:
  int n_rays_;
};

// Drives along the user input: (vx, vy) = (ux, uy) * v_max, no rotation.
class EchoController : public Controller {
 public:
  explicit EchoController(int n_rays = 36) : n_rays_(n_rays) {}
  std::string name() const override { return "echo"; }
  int n_rays() const override { return n_rays_; }
  ActionVector act(const Observed& observed, const EnvConfig& config) override;

 private:
  int n_rays_;
};

// "rds", "zero", "echo" or a checkpoint path. Throws ConfigurationError for
// an unreadable checkpoint.
std::unique_ptr<Controller> make_controller(const std::string& policy);

struct EvalOptions {
  int max_steps = 1200;
  double goal_radius = 0.3;
  RewardWeights reward;  // reward is logged, not optimized
  std::uint64_t seed = 0;
};

struct MetricsReport {
  std::string scenario;
  std::string policy;
  bool success = false;
  DoneReason done_reason = DoneReason::kRunning;
  int steps = 0;
  double duration = 0.0;
  double path_length = 0.0;
  int collision_records = 0;
  std::vector<double> heading_time;
  std::vector<double> heading;
  std::vector<double> jerk_time;
  std::vector<double> jerk;
  std::optional<Quartiles> heading_quartiles;
  std::optional<Quartiles> jerk_quartiles;
};

struct ScenarioRun {
  TrajectoryLog log;
  MetricsReport report;
};

// Runs to GoalReached, Collision or Timeout with the simulated user.
ScenarioRun run_scenario(const ScenarioSpec& spec, Controller& controller,
                         const EvalOptions& options = {});

// Recomputes the report from a log. Heading and jerk series drop the first
// and last record; records with zero input carry no heading.
MetricsReport metrics_from_log(const TrajectoryLog& log);

nlohmann::json to_json(const MetricsReport& report);

// Writes summary.json (runs plus success matrix), table.txt (quartiles side
// by side per policy) and series/<policy>__<scenario>_{heading,jerk}.dat.
// Returns the summary document.
nlohmann::json emit_report(const std::vector<MetricsReport>& reports,
                           const std::filesystem::path& out_dir);

// Side-by-side table text used by emit_report.
std::string report_table(const std::vector<MetricsReport>& reports);

}  // namespace shared_control

#endif  // SHARED_CONTROL_EVALUATION_HPP_
