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

#include "shared_control/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <system_error>

#include "CLI11.hpp"
#include "shared_control/evaluation.hpp"
#include "shared_control/run_config.hpp"
#include "shared_control/teleop_server.hpp"
#include "shared_control/trainer.hpp"
#include "shared_control/trajectory_log.hpp"
#include "shared_control/world_io.hpp"

#ifndef SHARED_CONTROL_ASSETS_DIR
#define SHARED_CONTROL_ASSETS_DIR ""
#endif

namespace shared_control {
namespace {

namespace fs = std::filesystem;

struct TrainArgs {
  std::string config;
  std::string arch;
  std::string reward;
  std::string envs;
  std::optional<int> epochs;
  std::optional<int> stage_one_epochs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> checkpoint_every;
  std::string resume;
  std::optional<int> n_envs;
  std::optional<int> horizon;
  std::optional<int> minibatch;
  bool quiet = false;
};

struct EvalArgs {
  std::vector<std::string> policies;
  std::string scenarios = "all";
  double vmax = kEvalVMaxLin;
  double wmax = kEvalOmegaMax;
  std::string out;
  std::uint64_t seed = 0;
  int max_steps = 1200;
};

struct ReplayArgs {
  std::vector<std::string> logs;
  std::string out;
};

struct ServeArgs {
  std::string policy = "rds";
  std::vector<std::string> checkpoints;
  std::string world = "empty";
  std::string worlds_dir = SHARED_CONTROL_ASSETS_DIR "/worlds";
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  std::string static_dir;
  double vmax = kEvalVMaxLin;
  double wmax = kEvalOmegaMax;
  std::uint64_t seed = 0;
};

fs::path default_output(const std::string& explicit_dir, const std::string& leaf) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return fs::path(env) / leaf;
  }
  return fs::path("runs") / leaf;
}

int run_train(const TrainArgs& a, std::ostream& out, std::ostream& err,
              const std::string& usage) {
  RunConfig config;
  bool arch_given = !a.arch.empty();
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) {
      err << "error: cannot read config " << a.config << '\n';
      return kExitFailure;
    }
    const nlohmann::json doc = nlohmann::json::parse(f);
    config = run_config_from_json(doc);
    arch_given = arch_given || doc.contains("arch");
  }
  if (!arch_given) {
    err << "error: an architecture is required (--arch or \"arch\" in --config)\n" << usage;
    return kExitUsage;
  }
  if (!a.arch.empty()) config.arch = a.arch;
  if (!a.reward.empty()) config.reward = a.reward;
  if (!a.envs.empty()) config.envs = a.envs;
  if (a.epochs) config.epochs = *a.epochs;
  if (a.stage_one_epochs) config.stage_one_epochs = *a.stage_one_epochs;
  if (a.seed) config.seed = *a.seed;
  if (!a.out.empty()) config.output_dir = a.out;
  if (a.checkpoint_every) config.checkpoint_every = *a.checkpoint_every;
  if (a.n_envs) config.hyper.n_envs = *a.n_envs;
  if (a.horizon) config.hyper.horizon = *a.horizon;
  if (a.minibatch) config.hyper.minibatch_size = *a.minibatch;

  TrainConfig train = to_train_config(config);
  train.output_dir = resolve_output_dir(config);
  fs::create_directories(train.output_dir);
  {
    std::ofstream f(train.output_dir / "config.json", std::ios::trunc);
    f << to_json(config).dump(2) << '\n';
  }
  Trainer trainer = a.resume.empty() ? Trainer(train) : Trainer::resume(train, a.resume);
  out << "training " << config.arch << " reward " << config.reward << " envs " << config.envs
      << " seed " << config.seed << " -> " << train.output_dir.string() << '\n';
  trainer.train([&](const EpochStats& s) {
    if (a.quiet) return;
    out << "epoch " << s.epoch + 1 << "/" << config.epochs << " reward " << s.mean_reward << " tracking "
        << s.mean_tracking << " goal " << s.goal_rate << " collision " << s.collision_rate
        << " phi " << s.mean_phi << '\n';
  });
  out << "wrote " << (train.output_dir / "policy.bin").string() << '\n';
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<ScenarioSpec> scenarios = select_scenarios(a.scenarios, a.vmax, a.wmax);
  std::vector<std::unique_ptr<Controller>> controllers;
  for (const std::string& p : a.policies) {
    if (p != "rds" && p != "zero" && p != "echo" && !fs::exists(p)) {
      err << "error: checkpoint not found: " << p << '\n';
      return kExitFailure;
    }
    controllers.push_back(make_controller(p));
  }
  const fs::path dir = default_output(a.out, "eval");
  fs::create_directories(dir / "logs");
  EvalOptions options;
  options.seed = a.seed;
  options.max_steps = a.max_steps;
  std::vector<MetricsReport> reports;
  for (auto& controller : controllers) {
    for (const ScenarioSpec& spec : scenarios) {
      ScenarioRun run = run_scenario(spec, *controller, options);
      write_log(run.log, dir / "logs" / (controller->name() + "__" + spec.name() + ".log"));
      out << controller->name() << ' ' << spec.name() << ' '
          << done_reason_name(run.report.done_reason) << " steps " << run.report.steps
          << '\n';
      reports.push_back(std::move(run.report));
    }
  }
  emit_report(reports, dir);
  out << report_table(reports);
  out << "wrote " << (dir / "summary.json").string() << '\n';
  return kExitOk;
}

int run_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<MetricsReport> reports;
  for (const std::string& path : a.logs) {
    TrajectoryLog log;
    try {
      log = read_log(fs::path(path));
      validate(log);
    } catch (const LogFormatError& e) {
      err << "error: " << path << ": " << e.what() << '\n';
      return kExitFailure;
    }
    if (log.records.size() < 3) {
      err << "warning: " << path << ": " << log.records.size()
          << " records; heading and jerk series are empty\n";
    }
    MetricsReport report = metrics_from_log(log);
    out << to_json(report).dump() << '\n';
    reports.push_back(std::move(report));
  }
  if (!a.out.empty()) emit_report(reports, a.out);
  return kExitOk;
}

int run_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  ServeOptions options;
  options.address = a.address;
  options.port = a.port;
  options.static_dir = a.static_dir;
  options.handle_signals = true;
  TeleopCatalog& catalog = options.catalog;
  catalog.v_max_lin = a.vmax;
  catalog.omega_max = a.wmax;
  catalog.seed = a.seed;

  if (!a.worlds_dir.empty() && fs::is_directory(a.worlds_dir)) {
    for (const auto& entry : fs::directory_iterator(a.worlds_dir)) {
      if (entry.path().extension() != ".json") continue;
      catalog.worlds[entry.path().stem().string()] =
          std::make_shared<const WorldSpec>(load_world(entry.path()));
    }
  }
  catalog.initial_world = a.world;
  if (fs::is_regular_file(a.world)) {
    const std::string name = fs::path(a.world).stem().string();
    catalog.worlds[name] = std::make_shared<const WorldSpec>(load_world(a.world));
    catalog.initial_world = name;
  }
  for (const std::string& item : a.checkpoints) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --checkpoint expects name=path, got " << item << '\n';
      return kExitUsage;
    }
    const std::string path = item.substr(eq + 1);
    if (!fs::exists(path)) {
      err << "error: checkpoint not found: " << path << '\n';
      return kExitFailure;
    }
    catalog.checkpoints[item.substr(0, eq)] = path;
  }
  catalog.initial_policy = a.policy;
  if (a.policy != "rds" && a.policy != "zero" && a.policy != "echo" &&
      !catalog.checkpoints.count(a.policy)) {
    if (!fs::exists(a.policy)) {
      err << "error: unknown policy or missing checkpoint: " << a.policy << '\n';
      return kExitFailure;
    }
    const std::string name = fs::path(a.policy).stem().string();
    catalog.checkpoints[name] = a.policy;
    catalog.initial_policy = name;
  }

  std::unique_ptr<TeleopServer> server;
  try {
    server = std::make_unique<TeleopServer>(options);
  } catch (const std::system_error& e) {
    err << "error: cannot listen on " << a.address << ':' << a.port << ": " << e.what()
        << '\n';
    return kExitFailure;
  }
  out << "serving http://" << a.address << ':' << server->port() << "/ (websocket /teleop)"
      << std::endl;
  server->run();
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared-control policy training, evaluation and teleoperation",
               "shared_control"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a policy with PPO");
  train_cmd->add_option("--config", train.config, "Run configuration JSON");
  train_cmd->add_option("--arch", train.arch,
                        "Architecture: FC, LFC, CLFC, CLFC_D, SCLFC_D");
  train_cmd->add_option("--reward", train.reward, "Reward profile name");
  train_cmd->add_option("--envs", train.envs, "Environment set, e.g. a,b,c,d");
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--stage-one-epochs", train.stage_one_epochs,
                        "Epochs restricted to the empty environment");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--out", train.out, "Output directory");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every,
                        "Checkpoint period in epochs");
  train_cmd->add_option("--resume", train.resume, "train_state.json to resume from");
  train_cmd->add_option("--n-envs", train.n_envs, "Parallel environments");
  train_cmd->add_option("--horizon", train.horizon, "Rollout horizon per environment");
  train_cmd->add_option("--minibatch", train.minibatch, "Minibatch size in transitions");
  train_cmd->add_flag("--quiet", train.quiet, "No per-epoch lines");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Run the benchmark scenarios");
  eval_cmd->add_option("--policy", eval.policies, "rds, zero, echo or a checkpoint path")
      ->required();
  eval_cmd->add_option("--scenarios", eval.scenarios,
                       "all, or filters such as box:4,angle:20")
      ->capture_default_str();
  eval_cmd->add_option("--vmax", eval.vmax, "Linear speed limit [m/s]")->capture_default_str();
  eval_cmd->add_option("--wmax", eval.wmax, "Angular speed limit [rad/s]")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Output directory");
  eval_cmd->add_option("--seed", eval.seed, "Seed recorded in the logs");
  eval_cmd->add_option("--max-steps", eval.max_steps, "Step budget per scenario")
      ->capture_default_str();

  ReplayArgs replay;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Validate trajectory logs and recompute metrics");
  replay_cmd->add_option("logs", replay.logs, "Trajectory log files")->required();
  replay_cmd->add_option("--out", replay.out, "Write summary.json and table.txt here");

  ServeArgs serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Teleoperation server");
  serve_cmd->add_option("--policy", serve.policy, "Initial policy")->capture_default_str();
  serve_cmd->add_option("--checkpoint", serve.checkpoints, "Extra policy as name=path");
  serve_cmd->add_option("--world", serve.world, "Initial world name or world file")
      ->capture_default_str();
  serve_cmd->add_option("--worlds-dir", serve.worlds_dir, "Directory of world files")
      ->capture_default_str();
  serve_cmd->add_option("--address", serve.address, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Listen port (0 picks one)")
      ->capture_default_str();
  serve_cmd->add_option("--static", serve.static_dir, "UI bundle directory");
  serve_cmd->add_option("--vmax", serve.vmax, "Linear speed limit [m/s]")
      ->capture_default_str();
  serve_cmd->add_option("--wmax", serve.wmax, "Angular speed limit [rad/s]")
      ->capture_default_str();
  serve_cmd->add_option("--seed", serve.seed, "Start pose seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    err << "error: " << e.what() << '\n' << target->help();
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train, out, err, train_cmd->help());
    if (*eval_cmd) return run_eval(eval, out, err);
    if (*replay_cmd) return run_replay(replay, out, err);
    if (*serve_cmd) return run_serve(serve, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace shared_control
