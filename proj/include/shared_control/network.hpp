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

// Actor-critic network family:
//
//   lidar -> [conv1 -> conv2 -> fc0] --+
//                                      +-> [lstm] -> fc1 -> [fc2] -> mean (3)
//   user input, velocity, actions -----+                          -> value (1)
//
// Bracketed stages are optional per architecture. Hidden activations are ELU,
// heads are linear, convolutions pad circularly so the last ray neighbors
// the first. Parameters live in one flat fp64 vector; the last three entries
// are the state-independent log standard deviations of the Gaussian policy.

#ifndef SHARED_CONTROL_NETWORK_HPP_
#define SHARED_CONTROL_NETWORK_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shared_control/action.hpp"
#include "shared_control/rng.hpp"

namespace shared_control {

struct ConvLayerSpec {
  int kernel = 0;
  int channels = 0;
  int stride = 1;
};

struct LcnnSpec {
  ConvLayerSpec conv1;
  ConvLayerSpec conv2;
  int fc0 = 0;
};

struct ArchitectureSpec {
  std::string name;
  std::optional<LcnnSpec> lcnn;
  int lstm = 0;  // 0: no recurrent core
  int fc1 = 0;
  int fc2 = 0;   // 0: single hidden FC layer
  int n_rays = 36;
};

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FC, LFC, CLFC, CLFC_D, SCLFC_D (SCLFC_D_R1 / SCLFC_D_R2 share SCLFC_D).
ArchitectureSpec architecture(std::string_view name);
std::vector<std::string> architecture_names();
void validate(const ArchitectureSpec& spec);

struct RecurrentState {
  std::vector<double> h;
  std::vector<double> c;

  explicit RecurrentState(int units = 0) : h(units, 0.0), c(units, 0.0) {}
  void reset() {
    std::fill(h.begin(), h.end(), 0.0);
    std::fill(c.begin(), c.end(), 0.0);
  }
  bool operator==(const RecurrentState&) const = default;
};

struct TensorInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return rows * cols; }
};

struct PolicyOutput {
  std::array<double, kActionSize> mean{};
  double value = 0.0;
  RecurrentState state;
};

// Upstream gradient for one forward step. d_h / d_c may be empty (zero).
struct OutputGradient {
  std::array<double, kActionSize> d_mean{};
  double d_value = 0.0;
  std::vector<double> d_h;
  std::vector<double> d_c;
};

// Intermediate activations of one forward step, kept for backward.
struct ForwardCache {
  std::vector<double> input;
  std::vector<double> conv1_pre, conv1_out;  // position-major [pos][channel]
  std::vector<double> conv2_pre, conv2_out;
  std::vector<double> fc0_pre, fc0_out;
  std::vector<double> features;              // input to lstm / fc1
  std::vector<double> lstm_xh;               // [features; h_prev]
  std::vector<double> gates;                 // i f g o after nonlinearity
  std::vector<double> c_prev, c_new, tanh_c;
  std::vector<double> trunk_in;              // input to fc1
  std::vector<double> fc1_pre, fc1_out;
  std::vector<double> fc2_pre, fc2_out;
  std::vector<double> head_in;
};

struct LcnnActivations {
  std::vector<double> conv1;  // [position][channel]
  std::vector<double> conv2;
  std::vector<double> fc0;
};

class PolicyNetwork {
 public:
  explicit PolicyNetwork(ArchitectureSpec spec);

  const ArchitectureSpec& spec() const { return spec_; }
  std::size_t parameter_count() const { return parameter_count_; }
  int input_size() const { return input_size_; }
  int recurrent_units() const { return spec_.lstm; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }

  int conv1_length() const { return conv1_length_; }
  int conv2_length() const { return conv2_length_; }
  int flatten_size() const { return flatten_size_; }

  // Orthogonal hidden/recurrent weights, 0.01 gain on the action head, zero
  // biases, log_std set to `initial_log_std`.
  std::vector<double> initialize(Rng& rng, double initial_log_std) const;

  std::span<const double, kActionSize> log_std(std::span<const double> params) const;

  RecurrentState initial_state() const { return RecurrentState(spec_.lstm); }

  // Throws NumericError if an output is not finite.
  PolicyOutput forward(std::span<const double> params,
                       std::span<const double> observation,
                       const RecurrentState& state,
                       ForwardCache* cache = nullptr) const;

  // Accumulates dLoss/dparams into `grad` and, when requested, the gradient
  // with respect to the incoming recurrent state.
  void backward(std::span<const double> params, const ForwardCache& cache,
                const OutputGradient& upstream, std::span<double> grad,
                RecurrentState* d_state_in = nullptr) const;

  // LiDAR encoder alone; requires an LCNN architecture.
  LcnnActivations lcnn_forward(std::span<const double> params,
                               std::span<const double> lidar) const;

 private:
  struct Dense {
    std::size_t w = 0;  // offset of the row-major weight matrix
    std::size_t b = 0;
    int out = 0;
    int in = 0;
  };

  Dense add_dense(const std::string& name, int out, int in);
  void conv_forward(std::span<const double> params, const Dense& layer,
                    const ConvLayerSpec& conv, const double* in, int in_length,
                    int in_channels, std::vector<double>& pre,
                    std::vector<double>& out) const;
  void conv_backward(std::span<const double> params, const Dense& layer,
                     const ConvLayerSpec& conv, const double* in, int in_length,
                     int in_channels, std::vector<double>& d_pre,
                     std::span<double> grad, double* d_in) const;

  ArchitectureSpec spec_;
  int input_size_ = 0;
  int conv1_length_ = 0;
  int conv2_length_ = 0;
  int flatten_size_ = 0;
  std::vector<TensorInfo> tensors_;
  std::size_t parameter_count_ = 0;
  Dense conv1_, conv2_, fc0_, lstm_, fc1_, fc2_, mean_head_, value_head_;
  std::size_t log_std_offset_ = 0;
};

}  // namespace shared_control

#endif  // SHARED_CONTROL_NETWORK_HPP_
