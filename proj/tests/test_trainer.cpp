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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "shared_control/trainer.hpp"

namespace shared_control {
namespace {

namespace fs = std::filesystem;

TrainConfig small_config(const std::string& arch = "FC", std::uint64_t seed = 1) {
  TrainConfig c;
  c.seed = seed;
  c.arch = architecture(arch);
  c.env.lidar.n_rays = c.arch.n_rays;
  c.hyper.n_envs = 8;
  c.hyper.horizon = 32;
  c.hyper.minibatch_size = 64;
  c.epochs = 3;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "shared_control_trainer_test" / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Trainer, FullBatchGeometry) {
  Trainer t{TrainConfig{}};
  EpochStats stats;
  const RolloutBuffer& b = t.collect_rollouts(stats);
  EXPECT_EQ(b.size(), 16384u);
  EXPECT_EQ(stats.transitions, 16384u);
}

TEST(Trainer, ZeroPolicyDoesNotCollide) {
  Trainer t(small_config());
  std::vector<double>& p = t.mutable_params();
  std::fill(p.begin(), p.end(), 0.0);
  for (std::size_t j = p.size() - kActionSize; j < p.size(); ++j) p[j] = -20.0;
  EpochStats stats;
  t.collect_rollouts(stats);
  EXPECT_EQ(stats.collisions, 0);
}

TEST(Trainer, SeededRolloutsAreIdentical) {
  Trainer a(small_config("LFC")), b(small_config("LFC"));
  EpochStats sa, sb;
  const RolloutBuffer& ba = a.collect_rollouts(sa);
  const RolloutBuffer& bb = b.collect_rollouts(sb);
  EXPECT_EQ(ba.observations, bb.observations);
  EXPECT_EQ(ba.pre_squash, bb.pre_squash);
  EXPECT_EQ(ba.rewards, bb.rewards);
  EXPECT_EQ(ba.chunk_h, bb.chunk_h);
  EXPECT_EQ(to_json(sa), to_json(sb));
}

TEST(Trainer, SeededTrainingIsIdentical) {
  Trainer a(small_config()), b(small_config());
  const auto ra = a.train();
  const auto rb = b.train();
  ASSERT_EQ(ra.size(), 3u);
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(to_json(ra[i]), to_json(rb[i]));
  EXPECT_EQ(a.params(), b.params());
  Trainer c(small_config("FC", 2));
  c.train();
  EXPECT_NE(a.params(), c.params());
}

TEST(Trainer, ResumeReproducesNextEpoch) {
  for (const char* arch : {"FC", "LFC"}) {
    const fs::path dir = fresh_dir(std::string("resume_") + arch);
    fs::create_directories(dir);
    Trainer a(small_config(arch));
    a.run_epoch();
    a.run_epoch();
    a.save_state(dir / "state.json");
    const EpochStats next = a.run_epoch();
    Trainer b = Trainer::resume(small_config(arch), dir / "state.json");
    EXPECT_EQ(b.epoch(), 2);
    const EpochStats again = b.run_epoch();
    EXPECT_EQ(to_json(next), to_json(again)) << arch;
    EXPECT_EQ(a.params(), b.params()) << arch;
  }
}

TEST(Trainer, ResumeRejectsOtherArchitecture) {
  const fs::path dir = fresh_dir("resume_mismatch");
  fs::create_directories(dir);
  Trainer a(small_config("FC"));
  a.save_state(dir / "state.json");
  EXPECT_THROW(Trainer::resume(small_config("LFC"), dir / "state.json"), std::invalid_argument);
}

TEST(Trainer, CurriculumAssignsKindsPerEpoch) {
  TrainConfig c = small_config();
  c.env_set = {EnvKind::kEmpty, EnvKind::kCylinder, EnvKind::kBox, EnvKind::kDoor};
  c.stage_one_epochs = 1;
  Trainer t(c);
  const auto kinds = [&] {
    std::map<std::string, int> count;
    const nlohmann::json doc = t.state_to_json();
    for (const auto& e : doc.at("envs")) ++count[e.at("kind").get<std::string>()];
    return count;
  };
  EXPECT_EQ(kinds(), (std::map<std::string, int>{{"empty", 8}}));
  t.run_epoch();
  EpochStats s;
  t.collect_rollouts(s);
  EXPECT_EQ(kinds(), (std::map<std::string, int>{
                         {"box", 2}, {"cylinder", 2}, {"door", 2}, {"empty", 2}}));
}

TEST(Trainer, WritesOutputs) {
  const fs::path dir = fresh_dir("outputs");
  TrainConfig c = small_config();
  c.output_dir = dir;
  c.checkpoint_every = 2;
  c.epochs = 4;
  Trainer t(c);
  t.train();
  EXPECT_TRUE(fs::exists(dir / "policy.bin"));
  EXPECT_TRUE(fs::exists(dir / "train_state.json"));
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "epoch_0002.bin"));
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "epoch_0004.bin"));
  std::ifstream in(dir / "metrics.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    const auto doc = nlohmann::json::parse(line);
    EXPECT_EQ(doc.at("epoch").get<int>(), lines);
    ++lines;
  }
  EXPECT_EQ(lines, 4);
}

TEST(Trainer, RejectsIndivisibleBatch) {
  TrainConfig c = small_config();
  c.hyper.minibatch_size = 100;
  EXPECT_THROW(Trainer{c}, std::invalid_argument);
}

// A short run improves intent tracking and starts reaching the target.
TEST(Trainer, LearningSmoke) {
  TrainConfig c = small_config("FC", 3);
  c.hyper.n_envs = 64;
  c.hyper.horizon = 128;
  c.hyper.minibatch_size = 2048;
  c.epochs = 60;
  Trainer t(c);
  const auto stats = t.train();
  double first = 0.0, last = 0.0, goal = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    first += stats[i].mean_tracking / 5.0;
    last += stats[stats.size() - 1 - i].mean_tracking / 5.0;
    goal += stats[stats.size() - 1 - i].goal_rate / 5.0;
  }
  EXPECT_GT(last, first + 0.025) << "first " << first << " last " << last;
  EXPECT_GT(goal, 0.5);
}

}  // namespace
}  // namespace shared_control
