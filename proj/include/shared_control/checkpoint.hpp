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

// Policy checkpoint file:
//
//   bytes 0..7    magic "SCPOLICY"
//   u32 LE        format version (1)
//   u32 LE        header length N
//   N bytes       JSON header: architecture, tensor table, log_std, metadata
//   4 * P bytes   parameters as little-endian IEEE-754 binary32, in tensor
//                 table order
//
// The header repeats log_std in full precision.

#ifndef SHARED_CONTROL_CHECKPOINT_HPP_
#define SHARED_CONTROL_CHECKPOINT_HPP_

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "shared_control/network.hpp"

namespace shared_control {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct PolicyCheckpoint {
  ArchitectureSpec spec;
  std::vector<double> params;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json architecture_to_json(const ArchitectureSpec& spec);
ArchitectureSpec architecture_from_json(const nlohmann::json& doc);

void save_checkpoint(const PolicyCheckpoint& checkpoint,
                     const std::filesystem::path& path);

// Throws ConfigurationError on a bad magic/version, an unknown architecture
// or a tensor table that does not match the architecture.
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

// Loads and additionally requires the stored architecture to equal `expected`.
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const ArchitectureSpec& expected);

}  // namespace shared_control

#endif  // SHARED_CONTROL_CHECKPOINT_HPP_
