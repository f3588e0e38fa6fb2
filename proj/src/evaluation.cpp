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

#include "shared_control/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "shared_control/checkpoint.hpp"
#include "shared_control/rds.hpp"

namespace shared_control {
namespace {

constexpr double kDoorThickness = 0.2;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string token(std::string s) {
  for (char& c : s) {
    if (c == ' ' || c == '\t' || c == '=' || c == '/' || c == '\\') c = '_';
  }
  return s.empty() ? "_" : s;
}

DoneReason parse_done_reason(const std::string& s) {
  for (DoneReason r : {DoneReason::kRunning, DoneReason::kCollision,
                       DoneReason::kGoalReached, DoneReason::kTimeout}) {
    if (done_reason_name(r) == s) return r;
  }
  throw LogFormatError(2, "unknown done_reason '" + s + "'");
}

nlohmann::json quartile_json(const std::optional<Quartiles>& q) {
  if (!q) return nullptr;
  return {{"min", q->min}, {"q1", q->q1}, {"median", q->median}, {"q3", q->q3},
          {"max", q->max}};
}

}  // namespace

std::string ScenarioSpec::name() const {
  const std::string angle = "_a" + fmt(incident_angle_deg);
  if (kind == ScenarioKind::kBox) return "box_l" + fmt(box_length) + angle;
  return "door_w" + fmt(door_width) + angle;
}

std::vector<ScenarioSpec> scenario_grid(double v_max_lin, double omega_max) {
  std::vector<ScenarioSpec> out;
  for (double length : {1.0, 2.0, 4.0}) {
    for (double angle : {0.0, 20.0}) {
      ScenarioSpec s;
      s.kind = ScenarioKind::kBox;
      s.box_length = length;
      s.box_width = 1.0;
      s.incident_angle_deg = angle;
      s.v_max_lin = v_max_lin;
      s.omega_max = omega_max;
      out.push_back(s);
    }
  }
  for (double width : {1.0, 1.25}) {
    for (double angle : {0.0, 20.0}) {
      ScenarioSpec s;
      s.kind = ScenarioKind::kDoor;
      s.door_width = width;
      s.incident_angle_deg = angle;
      s.v_max_lin = v_max_lin;
      s.omega_max = omega_max;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<ScenarioSpec> select_scenarios(std::string_view filter, double v_max_lin,
                                           double omega_max) {
  const std::vector<ScenarioSpec> grid = scenario_grid(v_max_lin, omega_max);
  if (filter.empty() || filter == "all") return grid;

  std::vector<std::pair<ScenarioKind, std::optional<double>>> kinds;
  std::optional<double> angle;
  std::string_view rest = filter;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto colon = item.find(':');
    const std::string key(item.substr(0, colon));
    std::optional<double> value;
    if (colon != std::string_view::npos) {
      const std::string v(item.substr(colon + 1));
      std::size_t used = 0;
      try {
        value = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size()) {
        throw std::invalid_argument("bad scenario filter value '" + v + "'");
      }
    }
    if (key == "box") {
      kinds.emplace_back(ScenarioKind::kBox, value);
    } else if (key == "door") {
      kinds.emplace_back(ScenarioKind::kDoor, value);
    } else if (key == "angle" && value) {
      angle = value;
    } else if (key == "all" && !value) {
      kinds.emplace_back(ScenarioKind::kBox, std::nullopt);
      kinds.emplace_back(ScenarioKind::kDoor, std::nullopt);
    } else {
      throw std::invalid_argument("unknown scenario filter '" + std::string(item) + "'");
    }
  }

  std::vector<ScenarioSpec> out;
  for (const ScenarioSpec& s : grid) {
    bool kind_ok = kinds.empty();
    for (const auto& [kind, size] : kinds) {
      if (kind != s.kind) continue;
      const double have = kind == ScenarioKind::kBox ? s.box_length : s.door_width;
      if (!size || std::abs(*size - have) < 1e-9) kind_ok = true;
    }
    if (kind_ok && (!angle || std::abs(*angle - s.incident_angle_deg) < 1e-9)) {
      out.push_back(s);
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("scenario filter '" + std::string(filter) +
                                "' selects nothing");
  }
  return out;
}

ScenarioLayout build_scenario(const ScenarioSpec& spec, double arena_half_extent) {
  auto world = std::make_shared<WorldSpec>();
  world->arena_half_extent = arena_half_extent;
  ScenarioLayout out;
  if (spec.kind == ScenarioKind::kBox) {
    world->obstacles.push_back(
        AxisBox{{0.0, 0.0}, {spec.box_width / 2.0, spec.box_length / 2.0}});
    out.near_face_x = -spec.box_width / 2.0;
    out.far_face_x = spec.box_width / 2.0;
  } else {
    world->obstacles = door_wall(arena_half_extent, spec.door_width, kDoorThickness);
    out.near_face_x = -kDoorThickness / 2.0;
    out.far_face_x = kDoorThickness / 2.0;
  }
  validate(*world);
  const double a = spec.incident_angle_deg * std::numbers::pi / 180.0;
  out.start.position = {out.near_face_x - spec.start_offset * std::cos(a),
                        -spec.start_offset * std::sin(a)};
  out.start.yaw = 0.0;
  out.target = {out.far_face_x + spec.target_offset, 0.0};
  out.world = std::move(world);
  return out;
}

NetworkController::NetworkController(std::string name, ArchitectureSpec spec,
                                     std::vector<double> params)
    : name_(std::move(name)), network_(std::move(spec)), params_(std::move(params)) {
  if (params_.size() != network_.parameter_count()) {
    throw ConfigurationError("parameter vector does not match " + network_.spec().name);
  }
  state_ = network_.initial_state();
}

ActionVector NetworkController::act(const Observed& observed, const EnvConfig&) {
  PolicyOutput out = network_.forward(params_, observed.observation.values, state_);
  state_ = std::move(out.state);
  return squashed_mean(out.mean);
}

ActionVector RdsController::act(const Observed& observed, const EnvConfig& config) {
  const auto constraints = build_constraints(observed.scan, config.capsule, tau_);
  const VelocityCommand cmd = solve_rds(observed.user_input, constraints, config.v_max_lin,
                                        config.omega_max, heading_gain_);
  return normalize_command(cmd, config.v_max_lin, config.omega_max);
}

ActionVector EchoController::act(const Observed& observed, const EnvConfig&) {
  ActionVector a;
  a[0] = std::clamp(observed.user_input.ux, -1.0, 1.0);
  a[1] = std::clamp(observed.user_input.uy, -1.0, 1.0);
  return a;
}

std::unique_ptr<Controller> make_controller(const std::string& policy) {
  if (policy == "rds") return std::make_unique<RdsController>();
  if (policy == "zero") return std::make_unique<ZeroController>();
  if (policy == "echo") return std::make_unique<EchoController>();
  PolicyCheckpoint c = load_checkpoint(policy);
  std::string name = c.metadata.value("label", c.spec.name);
  return std::make_unique<NetworkController>(std::move(name), c.spec, std::move(c.params));
}

ScenarioRun run_scenario(const ScenarioSpec& spec, Controller& controller,
                         const EvalOptions& options) {
  EnvConfig config;
  config.lidar.n_rays = controller.n_rays();
  config.v_max_lin = spec.v_max_lin;
  config.omega_max = spec.omega_max;
  config.max_steps = options.max_steps;
  config.goal_radius = options.goal_radius;
  validate(config);
  const RayThresholds thresholds = ray_thresholds(config.capsule, config.lidar);
  const ScenarioLayout layout = build_scenario(spec, config.arena_half_extent);

  EpisodeState state;
  state.pose = layout.start;
  state.target = layout.target;
  state.world = layout.world;
  controller.reset();
  Observed observed = observe(state, config);

  ScenarioRun run;
  TrajectoryLog& log = run.log;
  DoneReason reason = DoneReason::kRunning;
  while (reason == DoneReason::kRunning) {
    ActionVector action = controller.act(observed, config);
    for (double& v : action.values) v = std::clamp(v, -1.0, 1.0);
    auto [next, result] = step(state, action, config, options.reward, thresholds);
    TrajectoryRecord r;
    r.step = next.step_count;
    r.t = next.step_count * config.dt;
    r.pose = next.pose;
    r.commanded = scale_action(action, config.v_max_lin, config.omega_max);
    r.measured = next.measured_velocity;
    r.user_input = result.user_input;
    r.scan_min = *std::min_element(result.scan.ranges.begin(), result.scan.ranges.end());
    r.scan_digest = scan_digest(result.scan);
    r.reward = result.reward;
    r.collision = result.any_collision;
    r.critical = result.any_critical;
    log.records.push_back(r);
    reason = result.done_reason;
    state = std::move(next);
    observed = {std::move(result.observation), std::move(result.scan), result.user_input};
  }

  log.header = {{"scenario", spec.name()},
                {"policy", token(controller.name())},
                {"dt", real(config.dt)},
                {"v_max_lin", real(config.v_max_lin)},
                {"omega_max", real(config.omega_max)},
                {"n_rays", std::to_string(config.lidar.n_rays)},
                {"seed", std::to_string(options.seed)},
                {"start", real(layout.start.position.x) + "," + real(layout.start.position.y)},
                {"target", real(layout.target.x) + "," + real(layout.target.y)},
                {"done_reason", std::string(done_reason_name(reason))}};
  run.report = metrics_from_log(log);
  return run;
}

MetricsReport metrics_from_log(const TrajectoryLog& log) {
  validate(log);
  MetricsReport m;
  const auto get = [&](const char* key) {
    const auto it = log.header.find(key);
    return it == log.header.end() ? std::string() : it->second;
  };
  m.scenario = get("scenario");
  m.policy = get("policy");
  const std::string reason = get("done_reason");
  m.done_reason = reason.empty() ? DoneReason::kRunning : parse_done_reason(reason);
  const double dt = log.dt();
  const auto& rec = log.records;
  m.steps = static_cast<int>(rec.size());
  m.duration = m.steps * dt;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec[i].collision) ++m.collision_records;
    if (i > 0) m.path_length += (rec[i].pose.position - rec[i - 1].pose.position).norm();
  }
  m.success = m.done_reason == DoneReason::kGoalReached && m.collision_records == 0;

  for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
    if (const auto phi = heading_metric(rec[i].user_input)) {
      m.heading_time.push_back(rec[i].t);
      m.heading.push_back(*phi);
    }
  }
  std::vector<VelocityCommand> v;
  v.reserve(rec.size());
  for (const TrajectoryRecord& r : rec) v.push_back(r.measured);
  m.jerk = jerk_series(v, dt);
  for (std::size_t i = 1; i + 1 < rec.size(); ++i) m.jerk_time.push_back(rec[i].t);
  m.heading_quartiles = quartiles(m.heading);
  m.jerk_quartiles = quartiles(m.jerk);
  return m;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"scenario", r.scenario},
          {"policy", r.policy},
          {"success", r.success},
          {"done_reason", done_reason_name(r.done_reason)},
          {"steps", r.steps},
          {"duration", r.duration},
          {"path_length", r.path_length},
          {"collision_records", r.collision_records},
          {"heading_samples", r.heading.size()},
          {"jerk_samples", r.jerk.size()},
          {"heading", quartile_json(r.heading_quartiles)},
          {"jerk", quartile_json(r.jerk_quartiles)}};
}

std::string report_table(const std::vector<MetricsReport>& reports) {
  std::vector<std::string> policies;
  std::vector<std::string> scenarios;
  std::map<std::pair<std::string, std::string>, const MetricsReport*> cell;
  for (const MetricsReport& r : reports) {
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) {
      policies.push_back(r.policy);
    }
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
      scenarios.push_back(r.scenario);
    }
    cell[{r.scenario, r.policy}] = &r;
  }
  const auto q3 = [](const std::optional<Quartiles>& q) {
    if (!q) return std::string("-");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f/%.3f/%.3f", q->q1, q->median, q->q3);
    return std::string(buf);
  };

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-16s", "scenario");
  out << buf;
  for (const std::string& p : policies) {
    std::snprintf(buf, sizeof(buf), " | %-7s %-23s %-26s", p.c_str(), "heading q1/med/q3",
                  "jerk q1/med/q3");
    out << buf;
  }
  out << '\n';
  for (const std::string& s : scenarios) {
    std::snprintf(buf, sizeof(buf), "%-16s", s.c_str());
    out << buf;
    for (const std::string& p : policies) {
      const auto it = cell.find({s, p});
      if (it == cell.end()) {
        std::snprintf(buf, sizeof(buf), " | %-7s %-23s %-26s", "-", "-", "-");
      } else {
        const MetricsReport& r = *it->second;
        std::snprintf(buf, sizeof(buf), " | %-7s %-23s %-26s", r.success ? "ok" : "FAIL",
                      q3(r.heading_quartiles).c_str(), q3(r.jerk_quartiles).c_str());
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json emit_report(const std::vector<MetricsReport>& reports,
                           const std::filesystem::path& out_dir) {
  nlohmann::json summary = {{"runs", nlohmann::json::array()},
                            {"success_matrix", nlohmann::json::object()}};
  for (const MetricsReport& r : reports) {
    summary["runs"].push_back(to_json(r));
    summary["success_matrix"][r.scenario][r.policy] = r.success;
  }
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "summary.json", std::ios::trunc);
    f << summary.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write summary.json");
  }
  {
    std::ofstream f(out_dir / "table.txt", std::ios::trunc);
    f << report_table(reports);
    if (!f) throw std::runtime_error("cannot write table.txt");
  }
  if (!reports.empty()) std::filesystem::create_directories(out_dir / "series");
  const auto series = [&](const std::filesystem::path& path, const std::vector<double>& t,
                          const std::vector<double>& v) {
    std::ofstream f(path, std::ios::trunc);
    for (std::size_t i = 0; i < v.size(); ++i) f << real(t[i]) << ' ' << real(v[i]) << '\n';
    if (!f) throw std::runtime_error("cannot write " + path.string());
  };
  for (const MetricsReport& r : reports) {
    const std::string stem = token(r.policy) + "__" + token(r.scenario);
    series(out_dir / "series" / (stem + "_heading.dat"), r.heading_time, r.heading);
    series(out_dir / "series" / (stem + "_jerk.dat"), r.jerk_time, r.jerk);
  }
  return summary;
}

}  // namespace shared_control
