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

#include "shared_control/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace shared_control {
namespace {

constexpr char kMagic[8] = {'S', 'C', 'P', 'O', 'L', 'I', 'C', 'Y'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

nlohmann::json conv_to_json(const ConvLayerSpec& c) {
  return {{"kernel", c.kernel}, {"channels", c.channels}, {"stride", c.stride}};
}

ConvLayerSpec conv_from_json(const nlohmann::json& j) {
  return {j.at("kernel").get<int>(), j.at("channels").get<int>(),
          j.at("stride").get<int>()};
}

nlohmann::json tensor_table(const PolicyNetwork& net) {
  nlohmann::json table = nlohmann::json::array();
  for (const TensorInfo& t : net.tensors()) {
    table.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}});
  }
  return table;
}

}  // namespace

nlohmann::json architecture_to_json(const ArchitectureSpec& spec) {
  nlohmann::json j = {{"name", spec.name},   {"lstm", spec.lstm}, {"fc1", spec.fc1},
                      {"fc2", spec.fc2},     {"n_rays", spec.n_rays}};
  if (spec.lcnn) {
    j["lcnn"] = {{"conv1", conv_to_json(spec.lcnn->conv1)},
                 {"conv2", conv_to_json(spec.lcnn->conv2)},
                 {"fc0", spec.lcnn->fc0}};
  } else {
    j["lcnn"] = nullptr;
  }
  return j;
}

ArchitectureSpec architecture_from_json(const nlohmann::json& doc) {
  try {
    ArchitectureSpec spec;
    spec.name = doc.at("name").get<std::string>();
    spec.lstm = doc.at("lstm").get<int>();
    spec.fc1 = doc.at("fc1").get<int>();
    spec.fc2 = doc.at("fc2").get<int>();
    spec.n_rays = doc.at("n_rays").get<int>();
    if (doc.contains("lcnn") && !doc.at("lcnn").is_null()) {
      const auto& l = doc.at("lcnn");
      spec.lcnn = LcnnSpec{conv_from_json(l.at("conv1")), conv_from_json(l.at("conv2")),
                           l.at("fc0").get<int>()};
    }
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed architecture: ") + e.what());
  }
}

void save_checkpoint(const PolicyCheckpoint& checkpoint,
                     const std::filesystem::path& path) {
  const PolicyNetwork net(checkpoint.spec);
  if (checkpoint.params.size() != net.parameter_count()) {
    throw ConfigurationError("checkpoint parameter count does not match architecture");
  }
  const auto log_std = net.log_std(checkpoint.params);
  nlohmann::json header = {
      {"format_version", kCheckpointVersion},
      {"architecture", architecture_to_json(checkpoint.spec)},
      {"tensors", tensor_table(net)},
      {"parameter_count", net.parameter_count()},
      {"log_std", std::vector<double>(log_std.begin(), log_std.end())},
      {"metadata", checkpoint.metadata},
  };
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (double p : checkpoint.params) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("cannot open checkpoint " + path.string());
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::size_t prefix = sizeof(kMagic) + 8;
  if (in.size() < prefix || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ConfigurationError(path.string() + " is not a policy checkpoint");
  }
  const std::uint32_t version = get_u32(in, sizeof(kMagic));
  if (version != kCheckpointVersion) {
    throw ConfigurationError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t header_len = get_u32(in, sizeof(kMagic) + 4);
  if (in.size() < prefix + header_len) throw ConfigurationError("truncated checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.substr(prefix, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed checkpoint header: ") + e.what());
  }

  PolicyCheckpoint out;
  out.spec = architecture_from_json(header.at("architecture"));
  const PolicyNetwork net(out.spec);
  if (header.value("tensors", nlohmann::json::array()) != tensor_table(net)) {
    throw ConfigurationError("checkpoint tensor shapes do not match architecture " +
                             out.spec.name);
  }
  const std::size_t n = net.parameter_count();
  if (header.value("parameter_count", std::size_t{0}) != n ||
      in.size() != prefix + header_len + 4 * n) {
    throw ConfigurationError("checkpoint parameter blob has the wrong size");
  }
  out.params.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.params[i] = std::bit_cast<float>(get_u32(in, prefix + header_len + 4 * i));
  }
  const auto log_std = header.at("log_std").get<std::vector<double>>();
  if (log_std.size() != static_cast<std::size_t>(kActionSize)) {
    throw ConfigurationError("checkpoint log_std must have 3 entries");
  }
  std::copy(log_std.begin(), log_std.end(), out.params.end() - kActionSize);
  out.metadata = header.value("metadata", nlohmann::json::object());
  return out;
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const ArchitectureSpec& expected) {
  PolicyCheckpoint c = load_checkpoint(path);
  if (architecture_to_json(c.spec) != architecture_to_json(expected)) {
    throw ConfigurationError("checkpoint holds architecture " + c.spec.name +
                             ", expected " + expected.name);
  }
  return c;
}

}  // namespace shared_control
