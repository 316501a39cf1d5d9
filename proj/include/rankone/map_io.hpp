// Copyright 2026 The rankone Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "json.hpp"
#include "rankone/grid.hpp"

namespace rankone {

using Json = nlohmann::ordered_json;

inline constexpr int kMapFormatVersion = 1;

// Map file layout. Arrays are row-major with the last axis fastest. `inside`
// is a list of run lengths over all grid nodes, alternating outside/inside
// and starting with an outside run (possibly 0). `values` holds codim entries
// per inside node.
Json map_to_json(const SampledMap& map);
SampledMap map_from_json(const Json& j);

void save_map(const SampledMap& map, const std::string& path);
SampledMap load_map(const std::string& path);

Json read_json_file(const std::string& path);
// Pretty-printed with two-space indent and a trailing newline.
void write_json_file(const Json& j, const std::string& path);

}  // namespace rankone
