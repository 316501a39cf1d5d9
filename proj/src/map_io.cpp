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

#include "rankone/map_io.hpp"

#include <fstream>
#include <sstream>

#include "rankone/error.hpp"

namespace rankone {

Json map_to_json(const SampledMap& map) {
  const GridDomain& d = map.domain();
  Json j;
  j["version"] = kMapFormatVersion;
  j["dim"] = d.dim();
  j["shape"] = d.shape();
  j["spacing"] = d.spacing();
  j["origin"] = d.origin();
  const auto idx = d.multi_index(d.basepoint_flat());
  j["basepoint"] = std::vector<int>(idx.begin(), idx.begin() + d.dim());

  std::vector<std::size_t> runs;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (std::uint8_t bit : d.inside_mask()) {
    if (bit != current) {
      runs.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  runs.push_back(run);
  j["inside"] = runs;
  j["codim"] = map.codim();
  j["values"] = map.values();
  return j;
}

SampledMap map_from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != kMapFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported map version");
    }
    const int dim = j.at("dim").get<int>();
    auto shape = j.at("shape").get<std::vector<int>>();
    auto spacing = j.at("spacing").get<std::vector<double>>();
    auto origin = j.at("origin").get<std::vector<double>>();
    const auto base = j.at("basepoint").get<std::vector<int>>();
    if (static_cast<int>(shape.size()) != dim ||
        static_cast<int>(base.size()) != dim) {
      throw Error(ErrorCode::kFormat, "dimension mismatch");
    }
    std::size_t total = 1;
    for (int s : shape) {
      if (s < 1) throw Error(ErrorCode::kFormat, "bad shape");
      total *= static_cast<std::size_t>(s);
    }
    std::vector<std::uint8_t> inside;
    inside.reserve(total);
    std::uint8_t bit = 0;
    for (const auto& r : j.at("inside")) {
      inside.insert(inside.end(), r.get<std::size_t>(), bit);
      bit ^= 1;
    }
    if (inside.size() != total) {
      throw Error(ErrorCode::kFormat, "inside runs do not cover the grid");
    }
    std::size_t base_flat = 0;
    std::size_t stride = 1;
    for (int a = dim - 1; a >= 0; --a) {
      if (base[a] < 0 || base[a] >= shape[a]) {
        throw Error(ErrorCode::kBasepointOutside, "basepoint off the grid");
      }
      base_flat += stride * base[a];
      stride *= shape[a];
    }
    GridDomain domain(std::move(shape), std::move(spacing), std::move(origin),
                      std::move(inside), base_flat);
    check_connected(domain);
    const int codim = j.at("codim").get<int>();
    auto values = j.at("values").get<std::vector<double>>();
    if (codim < 1 ||
        values.size() != domain.node_count() * static_cast<std::size_t>(codim)) {
      throw Error(ErrorCode::kFormat, "values do not match the inside nodes");
    }
    return SampledMap(std::move(domain), codim, std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormat, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFormat, "cannot write " + path);
  out << j.dump(2) << '\n';
}

void save_map(const SampledMap& map, const std::string& path) {
  write_json_file(map_to_json(map), path);
}

SampledMap load_map(const std::string& path) {
  return map_from_json(read_json_file(path));
}

}  // namespace rankone
