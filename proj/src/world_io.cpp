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

#include "shared_control/world_io.hpp"

#include <fstream>
#include <stdexcept>

namespace shared_control {
namespace {

using nlohmann::json;

json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be a 2-element array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

json world_to_json(const WorldSpec& world) {
  json obstacles = json::array();
  for (const auto& shape : world.obstacles) {
    if (const auto* c = std::get_if<Circle>(&shape)) {
      obstacles.push_back(
          {{"type", "circle"}, {"center", vec_json(c->center)}, {"radius", c->radius}});
    } else if (const auto* b = std::get_if<AxisBox>(&shape)) {
      obstacles.push_back({{"type", "box"},
                           {"center", vec_json(b->center)},
                           {"half_extents", vec_json(b->half_extents)}});
    } else {
      const auto& s = std::get<Segment>(shape);
      obstacles.push_back({{"type", "segment"},
                           {"a", vec_json(s.a)},
                           {"b", vec_json(s.b)},
                           {"thickness", s.thickness}});
    }
  }
  return {{"arena_half_extent", world.arena_half_extent},
          {"obstacles", obstacles}};
}

WorldSpec world_from_json(const json& doc) {
  WorldSpec world;
  try {
    world.arena_half_extent = doc.at("arena_half_extent").get<double>();
    for (const json& item : doc.value("obstacles", json::array())) {
      const std::string type = item.at("type").get<std::string>();
      if (type == "circle") {
        world.obstacles.emplace_back(
            Circle{vec_from(item, "center"), item.at("radius").get<double>()});
      } else if (type == "box") {
        world.obstacles.emplace_back(
            AxisBox{vec_from(item, "center"), vec_from(item, "half_extents")});
      } else if (type == "segment") {
        world.obstacles.emplace_back(Segment{vec_from(item, "a"),
                                             vec_from(item, "b"),
                                             item.value("thickness", 0.0)});
      } else {
        throw std::invalid_argument("unknown obstacle type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed world document: ") +
                                e.what());
  }
  validate(world);
  return world;
}

WorldSpec load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open world file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return world_from_json(doc);
}

void save_world(const WorldSpec& world, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << world_to_json(world).dump(2) << '\n';
}

}  // namespace shared_control
