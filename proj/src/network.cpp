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

#include "shared_control/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "shared_control/observation.hpp"
#include "shared_control/simd/kernels.hpp"

namespace shared_control {
namespace {

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

// d elu / d pre, written in terms of the cached pre/post activations.
double elu_slope(double pre, double out) { return pre > 0.0 ? 1.0 : out + 1.0; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_elu(const std::vector<double>& pre, std::vector<double>& out) {
  out.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) out[i] = elu(pre[i]);
}

// d_pre = d_out * elu'(pre), in place on d_out.
void elu_backward(const std::vector<double>& pre, const std::vector<double>& out,
                  std::vector<double>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= elu_slope(pre[i], out[i]);
}

void orthogonal_fill(double* dst, int rows, int cols, double gain, Rng& rng) {
  const int tall = std::max(rows, cols);
  const int wide = std::min(rows, cols);
  Eigen::MatrixXd a(tall, wide);
  for (int c = 0; c < wide; ++c) {
    for (int r = 0; r < tall; ++r) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  // Sign fix makes the draw uniform over the orthogonal group.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(wide);
  for (int c = 0; c < wide; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      dst[static_cast<std::size_t>(i) * cols + j] =
          gain * (rows >= cols ? q(i, j) : q(j, i));
    }
  }
}

}  // namespace

ArchitectureSpec architecture(std::string_view name) {
  ArchitectureSpec spec;
  if (name == "FC") {
    spec = {"FC", std::nullopt, 0, 64, 64, 36};
  } else if (name == "LFC") {
    spec = {"LFC", std::nullopt, 128, 64, 64, 36};
  } else if (name == "CLFC") {
    spec = {"CLFC", LcnnSpec{{5, 16, 2}, {3, 8, 2}, 128}, 128, 128, 0, 360};
  } else if (name == "CLFC_D") {
    spec = {"CLFC_D", LcnnSpec{{5, 16, 2}, {3, 8, 2}, 128}, 128, 128, 0, 360};
  } else if (name == "SCLFC_D" || name == "SCLFC_D_R1" || name == "SCLFC_D_R2") {
    spec = {"SCLFC_D", LcnnSpec{{5, 8, 2}, {3, 4, 2}, 64}, 64, 64, 0, 360};
  } else {
    throw ConfigurationError("unknown architecture '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> architecture_names() {
  return {"FC", "LFC", "CLFC", "CLFC_D", "SCLFC_D"};
}

void validate(const ArchitectureSpec& spec) {
  if (spec.n_rays <= 0) throw ConfigurationError("n_rays must be positive");
  if (spec.fc1 <= 0) throw ConfigurationError("fc1 must be positive");
  if (spec.fc2 < 0 || spec.lstm < 0) throw ConfigurationError("negative layer size");
  if (spec.lcnn.has_value() != (spec.n_rays == 360)) {
    throw ConfigurationError("LiDAR CNN is used exactly with 360 rays");
  }
  if (spec.lcnn) {
    for (const ConvLayerSpec& c : {spec.lcnn->conv1, spec.lcnn->conv2}) {
      if (c.kernel <= 0 || c.kernel % 2 == 0 || c.channels <= 0 || c.stride <= 0) {
        throw ConfigurationError("conv layers need odd kernels and positive sizes");
      }
    }
    const int s1 = spec.lcnn->conv1.stride;
    const int s2 = spec.lcnn->conv2.stride;
    if (spec.n_rays % s1 != 0 || (spec.n_rays / s1) % s2 != 0) {
      throw ConfigurationError("ray count must be divisible by the conv strides");
    }
    if (spec.lcnn->fc0 <= 0) throw ConfigurationError("fc0 must be positive");
  }
}

PolicyNetwork::PolicyNetwork(ArchitectureSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  input_size_ = observation_size(spec_.n_rays);
  int features = input_size_;
  if (spec_.lcnn) {
    const LcnnSpec& l = *spec_.lcnn;
    conv1_length_ = spec_.n_rays / l.conv1.stride;
    conv2_length_ = conv1_length_ / l.conv2.stride;
    flatten_size_ = conv2_length_ * l.conv2.channels;
    conv1_ = add_dense("conv1", l.conv1.channels, l.conv1.kernel);
    conv2_ = add_dense("conv2", l.conv2.channels, l.conv2.kernel * l.conv1.channels);
    fc0_ = add_dense("fc0", l.fc0, flatten_size_);
    features = l.fc0 + kProprioceptiveSize;
  }
  int trunk = features;
  if (spec_.lstm > 0) {
    lstm_ = add_dense("lstm", 4 * spec_.lstm, features + spec_.lstm);
    trunk = spec_.lstm;
  }
  fc1_ = add_dense("fc1", spec_.fc1, trunk);
  int head = spec_.fc1;
  if (spec_.fc2 > 0) {
    fc2_ = add_dense("fc2", spec_.fc2, spec_.fc1);
    head = spec_.fc2;
  }
  mean_head_ = add_dense("mean", kActionSize, head);
  value_head_ = add_dense("value", 1, head);
  log_std_offset_ = parameter_count_;
  tensors_.push_back({"log_std", 1, kActionSize, parameter_count_});
  parameter_count_ += kActionSize;
}

PolicyNetwork::Dense PolicyNetwork::add_dense(const std::string& name, int out,
                                              int in) {
  Dense d;
  d.out = out;
  d.in = in;
  d.w = parameter_count_;
  tensors_.push_back({name + ".weight", size_t(out), size_t(in), parameter_count_});
  parameter_count_ += static_cast<std::size_t>(out) * in;
  d.b = parameter_count_;
  tensors_.push_back({name + ".bias", size_t(out), 1, parameter_count_});
  parameter_count_ += out;
  return d;
}

std::vector<double> PolicyNetwork::initialize(Rng& rng,
                                              double initial_log_std) const {
  std::vector<double> params(parameter_count_, 0.0);
  const double hidden_gain = std::sqrt(2.0);
  if (spec_.lcnn) {
    orthogonal_fill(&params[conv1_.w], conv1_.out, conv1_.in, hidden_gain, rng);
    orthogonal_fill(&params[conv2_.w], conv2_.out, conv2_.in, hidden_gain, rng);
    orthogonal_fill(&params[fc0_.w], fc0_.out, fc0_.in, hidden_gain, rng);
  }
  if (spec_.lstm > 0) orthogonal_fill(&params[lstm_.w], lstm_.out, lstm_.in, 1.0, rng);
  orthogonal_fill(&params[fc1_.w], fc1_.out, fc1_.in, hidden_gain, rng);
  if (spec_.fc2 > 0) orthogonal_fill(&params[fc2_.w], fc2_.out, fc2_.in, hidden_gain, rng);
  orthogonal_fill(&params[mean_head_.w], mean_head_.out, mean_head_.in, 0.01, rng);
  orthogonal_fill(&params[value_head_.w], value_head_.out, value_head_.in, 1.0, rng);
  for (int i = 0; i < kActionSize; ++i) params[log_std_offset_ + i] = initial_log_std;
  return params;
}

std::span<const double, kActionSize> PolicyNetwork::log_std(
    std::span<const double> params) const {
  return params.subspan(log_std_offset_).first<kActionSize>();
}

void PolicyNetwork::conv_forward(std::span<const double> params,
                                 const Dense& layer, const ConvLayerSpec& conv,
                                 const double* in, int in_length,
                                 int in_channels, std::vector<double>& pre,
                                 std::vector<double>& out) const {
  const auto& k = simd::active_kernels();
  const int out_length = in_length / conv.stride;
  const int pad = conv.kernel / 2;
  const int patch_size = conv.kernel * in_channels;
  std::vector<double> patch(patch_size);
  pre.assign(static_cast<std::size_t>(out_length) * conv.channels, 0.0);
  for (int i = 0; i < out_length; ++i) {
    for (int t = 0; t < conv.kernel; ++t) {
      int j = (i * conv.stride + t - pad) % in_length;
      if (j < 0) j += in_length;
      std::copy_n(in + static_cast<std::size_t>(j) * in_channels, in_channels,
                  patch.data() + t * in_channels);
    }
    double* row = pre.data() + static_cast<std::size_t>(i) * conv.channels;
    std::copy_n(params.data() + layer.b, conv.channels, row);
    k.gemv(params.data() + layer.w, patch.data(), row, conv.channels, patch_size);
  }
  apply_elu(pre, out);
}

void PolicyNetwork::conv_backward(std::span<const double> params,
                                  const Dense& layer, const ConvLayerSpec& conv,
                                  const double* in, int in_length,
                                  int in_channels, std::vector<double>& d_pre,
                                  std::span<double> grad, double* d_in) const {
  const auto& k = simd::active_kernels();
  const int out_length = in_length / conv.stride;
  const int pad = conv.kernel / 2;
  const int patch_size = conv.kernel * in_channels;
  std::vector<double> patch(patch_size);
  std::vector<double> d_patch(patch_size);
  for (int i = 0; i < out_length; ++i) {
    const double* d_row = d_pre.data() + static_cast<std::size_t>(i) * conv.channels;
    for (int t = 0; t < conv.kernel; ++t) {
      int j = (i * conv.stride + t - pad) % in_length;
      if (j < 0) j += in_length;
      std::copy_n(in + static_cast<std::size_t>(j) * in_channels, in_channels,
                  patch.data() + t * in_channels);
    }
    k.ger(grad.data() + layer.w, d_row, patch.data(), conv.channels, patch_size);
    k.axpy(1.0, d_row, grad.data() + layer.b, conv.channels);
    if (d_in == nullptr) continue;
    std::fill(d_patch.begin(), d_patch.end(), 0.0);
    k.gemv_t(params.data() + layer.w, d_row, d_patch.data(), conv.channels, patch_size);
    for (int t = 0; t < conv.kernel; ++t) {
      int j = (i * conv.stride + t - pad) % in_length;
      if (j < 0) j += in_length;
      k.axpy(1.0, d_patch.data() + t * in_channels,
             d_in + static_cast<std::size_t>(j) * in_channels, in_channels);
    }
  }
}

LcnnActivations PolicyNetwork::lcnn_forward(std::span<const double> params,
                                            std::span<const double> lidar) const {
  if (!spec_.lcnn) throw ConfigurationError(spec_.name + " has no LiDAR CNN");
  if (static_cast<int>(lidar.size()) != spec_.n_rays) {
    throw ConfigurationError("LiDAR input has " + std::to_string(lidar.size()) +
                             " rays, expected " + std::to_string(spec_.n_rays));
  }
  const auto& k = simd::active_kernels();
  const LcnnSpec& l = *spec_.lcnn;
  LcnnActivations out;
  std::vector<double> pre;
  conv_forward(params, conv1_, l.conv1, lidar.data(), spec_.n_rays, 1, pre, out.conv1);
  conv_forward(params, conv2_, l.conv2, out.conv1.data(), conv1_length_,
               l.conv1.channels, pre, out.conv2);
  pre.assign(params.begin() + fc0_.b, params.begin() + fc0_.b + fc0_.out);
  k.gemv(params.data() + fc0_.w, out.conv2.data(), pre.data(), fc0_.out, fc0_.in);
  apply_elu(pre, out.fc0);
  return out;
}

PolicyOutput PolicyNetwork::forward(std::span<const double> params,
                                    std::span<const double> observation,
                                    const RecurrentState& state,
                                    ForwardCache* cache) const {
  if (params.size() != parameter_count_) {
    throw ConfigurationError("parameter vector has " + std::to_string(params.size()) +
                             " entries, expected " + std::to_string(parameter_count_));
  }
  if (static_cast<int>(observation.size()) != input_size_) {
    throw ConfigurationError("observation has " + std::to_string(observation.size()) +
                             " entries, expected " + std::to_string(input_size_));
  }
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  const auto& k = simd::active_kernels();
  const double* p = params.data();

  auto dense = [&](const Dense& layer, const std::vector<double>& in,
                   std::vector<double>& pre) {
    pre.assign(p + layer.b, p + layer.b + layer.out);
    k.gemv(p + layer.w, in.data(), pre.data(), layer.out, layer.in);
  };

  c.input.assign(observation.begin(), observation.end());
  if (spec_.lcnn) {
    const LcnnSpec& l = *spec_.lcnn;
    conv_forward(params, conv1_, l.conv1, c.input.data(), spec_.n_rays, 1,
                 c.conv1_pre, c.conv1_out);
    conv_forward(params, conv2_, l.conv2, c.conv1_out.data(), conv1_length_,
                 l.conv1.channels, c.conv2_pre, c.conv2_out);
    dense(fc0_, c.conv2_out, c.fc0_pre);
    apply_elu(c.fc0_pre, c.fc0_out);
    c.features = c.fc0_out;
    c.features.insert(c.features.end(), observation.begin() + spec_.n_rays,
                      observation.end());
  } else {
    c.features = c.input;
  }

  PolicyOutput out;
  if (spec_.lstm > 0) {
    const int h = spec_.lstm;
    if (static_cast<int>(state.h.size()) != h || static_cast<int>(state.c.size()) != h) {
      throw ConfigurationError("recurrent state size mismatch");
    }
    c.lstm_xh = c.features;
    c.lstm_xh.insert(c.lstm_xh.end(), state.h.begin(), state.h.end());
    std::vector<double> z;
    dense(lstm_, c.lstm_xh, z);
    c.gates.resize(4 * h);
    for (int i = 0; i < h; ++i) {
      c.gates[i] = sigmoid(z[i]);
      c.gates[h + i] = sigmoid(z[h + i]);
      c.gates[2 * h + i] = std::tanh(z[2 * h + i]);
      c.gates[3 * h + i] = sigmoid(z[3 * h + i]);
    }
    c.c_prev = state.c;
    c.c_new.resize(h);
    c.tanh_c.resize(h);
    out.state = RecurrentState(h);
    for (int i = 0; i < h; ++i) {
      c.c_new[i] = c.gates[h + i] * c.c_prev[i] + c.gates[i] * c.gates[2 * h + i];
      c.tanh_c[i] = std::tanh(c.c_new[i]);
      out.state.c[i] = c.c_new[i];
      out.state.h[i] = c.gates[3 * h + i] * c.tanh_c[i];
    }
    c.trunk_in = out.state.h;
  } else {
    out.state = state;
    c.trunk_in = c.features;
  }

  dense(fc1_, c.trunk_in, c.fc1_pre);
  apply_elu(c.fc1_pre, c.fc1_out);
  if (spec_.fc2 > 0) {
    dense(fc2_, c.fc1_out, c.fc2_pre);
    apply_elu(c.fc2_pre, c.fc2_out);
    c.head_in = c.fc2_out;
  } else {
    c.head_in = c.fc1_out;
  }

  std::vector<double> mean;
  dense(mean_head_, c.head_in, mean);
  std::vector<double> value;
  dense(value_head_, c.head_in, value);
  for (int i = 0; i < kActionSize; ++i) out.mean[i] = mean[i];
  out.value = value[0];
  for (double m : out.mean) {
    if (!std::isfinite(m)) throw NumericError("non-finite action mean");
  }
  if (!std::isfinite(out.value)) throw NumericError("non-finite value estimate");
  return out;
}

void PolicyNetwork::backward(std::span<const double> params,
                             const ForwardCache& c,
                             const OutputGradient& upstream,
                             std::span<double> grad,
                             RecurrentState* d_state_in) const {
  const auto& k = simd::active_kernels();
  const double* p = params.data();
  double* g = grad.data();

  // Accumulates weight/bias gradients of a dense layer and returns d_input.
  auto dense_back = [&](const Dense& layer, const std::vector<double>& in,
                        const double* d_out) {
    k.ger(g + layer.w, d_out, in.data(), layer.out, layer.in);
    k.axpy(1.0, d_out, g + layer.b, layer.out);
    std::vector<double> d_in(layer.in, 0.0);
    k.gemv_t(p + layer.w, d_out, d_in.data(), layer.out, layer.in);
    return d_in;
  };

  std::vector<double> d_head = dense_back(mean_head_, c.head_in, upstream.d_mean.data());
  const std::vector<double> d_head_v =
      dense_back(value_head_, c.head_in, &upstream.d_value);
  k.axpy(1.0, d_head_v.data(), d_head.data(), d_head.size());

  std::vector<double> d_fc1;
  if (spec_.fc2 > 0) {
    elu_backward(c.fc2_pre, c.fc2_out, d_head);
    d_fc1 = dense_back(fc2_, c.fc1_out, d_head.data());
  } else {
    d_fc1 = std::move(d_head);
  }
  elu_backward(c.fc1_pre, c.fc1_out, d_fc1);
  std::vector<double> d_trunk = dense_back(fc1_, c.trunk_in, d_fc1.data());

  std::vector<double> d_features;
  if (spec_.lstm > 0) {
    const int h = spec_.lstm;
    const int x = lstm_.in - h;
    std::vector<double> dz(4 * h);
    std::vector<double> dc_prev(h);
    for (int i = 0; i < h; ++i) {
      const double gi = c.gates[i];
      const double gf = c.gates[h + i];
      const double gg = c.gates[2 * h + i];
      const double go = c.gates[3 * h + i];
      double dh = d_trunk[i];
      if (!upstream.d_h.empty()) dh += upstream.d_h[i];
      double dc = dh * go * (1.0 - c.tanh_c[i] * c.tanh_c[i]);
      if (!upstream.d_c.empty()) dc += upstream.d_c[i];
      const double d_o = dh * c.tanh_c[i];
      dz[i] = dc * gg * gi * (1.0 - gi);
      dz[h + i] = dc * c.c_prev[i] * gf * (1.0 - gf);
      dz[2 * h + i] = dc * gi * (1.0 - gg * gg);
      dz[3 * h + i] = d_o * go * (1.0 - go);
      dc_prev[i] = dc * gf;
    }
    const std::vector<double> d_xh = dense_back(lstm_, c.lstm_xh, dz.data());
    d_features.assign(d_xh.begin(), d_xh.begin() + x);
    if (d_state_in != nullptr) {
      d_state_in->h.assign(d_xh.begin() + x, d_xh.end());
      d_state_in->c = std::move(dc_prev);
    }
  } else {
    d_features = std::move(d_trunk);
    if (d_state_in != nullptr) {
      *d_state_in = RecurrentState(0);
    }
  }

  if (spec_.lcnn) {
    const LcnnSpec& l = *spec_.lcnn;
    std::vector<double> d_fc0(d_features.begin(), d_features.begin() + l.fc0);
    elu_backward(c.fc0_pre, c.fc0_out, d_fc0);
    std::vector<double> d_conv2 = dense_back(fc0_, c.conv2_out, d_fc0.data());
    elu_backward(c.conv2_pre, c.conv2_out, d_conv2);
    std::vector<double> d_conv1(c.conv1_out.size(), 0.0);
    conv_backward(params, conv2_, l.conv2, c.conv1_out.data(), conv1_length_,
                  l.conv1.channels, d_conv2, grad, d_conv1.data());
    elu_backward(c.conv1_pre, c.conv1_out, d_conv1);
    conv_backward(params, conv1_, l.conv1, c.input.data(), spec_.n_rays, 1,
                  d_conv1, grad, nullptr);
  }
}

}  // namespace shared_control
