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

// WorldSpec <-> JSON document:
//
//   {
//     "arena_half_extent": 5.0,
//     "obstacles": [
//       {"type": "circle",  "center": [x, y], "radius": r},
//       {"type": "box",     "center": [x, y], "half_extents": [hx, hy]},
//       {"type": "segment", "a": [x, y], "b": [x, y], "thickness": t}
//     ]
//   }

#ifndef SHARED_CONTROL_WORLD_IO_HPP_
#define SHARED_CONTROL_WORLD_IO_HPP_

#include <filesystem>

#include "json.hpp"
#include "shared_control/geometry.hpp"

namespace shared_control {

nlohmann::json world_to_json(const WorldSpec& world);

// Throws std::invalid_argument on unknown types, missing fields or a world
// violating its invariants.
WorldSpec world_from_json(const nlohmann::json& doc);

WorldSpec load_world(const std::filesystem::path& path);
void save_world(const WorldSpec& world, const std::filesystem::path& path);

}  // namespace shared_control

#endif  // SHARED_CONTROL_WORLD_IO_HPP_
