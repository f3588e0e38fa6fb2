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

#include <cmath>

#include "shared_control/network.hpp"
#include "shared_control/observation.hpp"
#include "support/gradient_check.hpp"

namespace shared_control {
namespace {

class GradientTest : public ::testing::TestWithParam<std::string> {};

TEST_P(GradientTest, AnalyticMatchesFiniteDifference) {
  for (std::uint64_t seed : {1u, 2u}) {
    const oracle::GradientCheck check = oracle::check_network_gradient(GetParam(), seed);
    EXPECT_LT(check.param_error, 1e-4) << "seed " << seed;
    EXPECT_LT(check.state_error, 1e-4) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllArchitectures, GradientTest,
                         ::testing::Values("FC", "LFC", "CLFC", "CLFC_D", "SCLFC_D"));

TEST(Architecture, Sizes) {
  const PolicyNetwork fc(architecture("FC"));
  EXPECT_EQ(fc.input_size(), 47);
  EXPECT_EQ(fc.recurrent_units(), 0);
  const PolicyNetwork sclfc(architecture("SCLFC_D"));
  EXPECT_EQ(sclfc.input_size(), 371);
  EXPECT_EQ(sclfc.conv1_length(), 180);
  EXPECT_EQ(sclfc.conv2_length(), 90);
  EXPECT_EQ(sclfc.flatten_size(), 360);
  const PolicyNetwork clfc(architecture("CLFC"));
  EXPECT_EQ(clfc.flatten_size(), 720);
  EXPECT_EQ(architecture("SCLFC_D_R2").name, "SCLFC_D");
  EXPECT_THROW(architecture("MLP"), std::invalid_argument);
}

TEST(Architecture, LcnnOutputWidths) {
  Rng rng(3);
  for (const char* name : {"CLFC", "SCLFC_D"}) {
    const PolicyNetwork net(architecture(name));
    const auto params = net.initialize(rng, 0.0);
    const std::vector<double> lidar(360, 0.4);
    const LcnnActivations act = net.lcnn_forward(params, lidar);
    EXPECT_EQ(static_cast<int>(act.fc0.size()), net.spec().lcnn->fc0);
    EXPECT_EQ(static_cast<int>(act.conv2.size()), net.flatten_size());
  }
  EXPECT_EQ(architecture("CLFC").lcnn->fc0, 128);
  EXPECT_EQ(architecture("SCLFC_D").lcnn->fc0, 64);
}

TEST(Architecture, ConstantScanGivesConstantConvOutput) {
  Rng rng(4);
  const PolicyNetwork net(architecture("SCLFC_D"));
  auto params = net.initialize(rng, 0.0);
  for (double& p : params) p += 0.05 * rng.normal();
  const std::vector<double> lidar(360, 0.7);
  const LcnnActivations act = net.lcnn_forward(params, lidar);
  const int c1 = net.spec().lcnn->conv1.channels;
  for (int pos = 1; pos < net.conv1_length(); ++pos) {
    for (int ch = 0; ch < c1; ++ch) {
      EXPECT_NEAR(act.conv1[pos * c1 + ch], act.conv1[ch], 1e-12);
    }
  }
  const int c2 = net.spec().lcnn->conv2.channels;
  for (int pos = 1; pos < net.conv2_length(); ++pos) {
    for (int ch = 0; ch < c2; ++ch) {
      EXPECT_NEAR(act.conv2[pos * c2 + ch], act.conv2[ch], 1e-12);
    }
  }
}

TEST(Forward, ZeroWeightsGiveZeroOutputs) {
  for (const std::string& name : architecture_names()) {
    const PolicyNetwork net(architecture(name));
    const std::vector<double> params(net.parameter_count(), 0.0);
    const std::vector<double> obs(net.input_size(), 0.3);
    const PolicyOutput out = net.forward(params, obs, net.initial_state());
    for (double m : out.mean) EXPECT_EQ(m, 0.0) << name;
    EXPECT_EQ(out.value, 0.0) << name;
  }
}

TEST(Forward, RecurrenceOnlyWithLstm) {
  Rng rng(5);
  const PolicyNetwork fc(architecture("FC"));
  const auto pf = fc.initialize(rng, 0.0);
  std::vector<double> obs(47);
  for (double& x : obs) x = rng.uniform(-1, 1);
  EXPECT_EQ(fc.forward(pf, obs, fc.initial_state()).state, fc.initial_state());

  const PolicyNetwork lfc(architecture("LFC"));
  const auto pl = lfc.initialize(rng, 0.0);
  const PolicyOutput out = lfc.forward(pl, obs, lfc.initial_state());
  EXPECT_NE(out.state, lfc.initial_state());
  EXPECT_EQ(out.state.h.size(), 128u);
}

TEST(Forward, NonFiniteInputRaises) {
  Rng rng(6);
  const PolicyNetwork net(architecture("FC"));
  const auto params = net.initialize(rng, 0.0);
  std::vector<double> obs(47, 0.0);
  obs[3] = std::nan("");
  EXPECT_THROW(net.forward(params, obs, net.initial_state()), NumericError);
}

TEST(Initialize, LogStdAndDeterminism) {
  const PolicyNetwork net(architecture("FC"));
  Rng a(7), b(7);
  const auto pa = net.initialize(a, -0.5);
  const auto pb = net.initialize(b, -0.5);
  EXPECT_EQ(pa, pb);
  for (double s : net.log_std(pa)) EXPECT_EQ(s, -0.5);
  EXPECT_EQ(pa.size(), net.parameter_count());
}

TEST(Initialize, HiddenWeightsAreOrthogonal) {
  const PolicyNetwork net(architecture("FC"));
  Rng rng(8);
  const auto params = net.initialize(rng, 0.0);
  for (const TensorInfo& t : net.tensors()) {
    if (t.rows < 2 || t.cols < 2 || t.name.find("mean") != std::string::npos ||
        t.name.find("value") != std::string::npos) {
      continue;
    }
    // Rows (or columns, whichever are fewer) are orthonormal up to the gain.
    const bool by_rows = t.rows <= t.cols;
    const std::size_t n = by_rows ? t.rows : t.cols;
    const std::size_t m = by_rows ? t.cols : t.rows;
    const auto at = [&](std::size_t i, std::size_t k) {
      return by_rows ? params[t.offset + i * t.cols + k] : params[t.offset + k * t.cols + i];
    };
    double g0 = 0.0;
    for (std::size_t k = 0; k < m; ++k) g0 += at(0, k) * at(0, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < m; ++k) d += at(i, k) * at(j, k);
        EXPECT_NEAR(d, i == j ? g0 : 0.0, 1e-9) << t.name;
      }
    }
  }
}

}  // namespace
}  // namespace shared_control
