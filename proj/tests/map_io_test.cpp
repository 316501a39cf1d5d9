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

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "rankone/map_io.hpp"
#include "test_util.hpp"

using namespace rankone;
using rankone::testing::error_code;

namespace {

void check_same(const SampledMap& a, const SampledMap& b) {
  const auto& da = a.domain();
  const auto& db = b.domain();
  CHECK(da.shape() == db.shape());
  CHECK(da.spacing() == db.spacing());
  CHECK(da.origin() == db.origin());
  CHECK(da.inside_mask() == db.inside_mask());
  CHECK(da.basepoint_flat() == db.basepoint_flat());
  CHECK(a.codim() == b.codim());
  CHECK(a.values() == b.values());
}

}  // namespace

TEST_CASE("map json round trip is exact") {
  for (auto c : {MapCase::kConstant, MapCase::kSaddleReeb,
                 MapCase::kFullRankCounterexample, MapCase::kMonotoneLine}) {
    const auto m = generate_map(c, rankone::testing::unit_disk(33));
    check_same(m, map_from_json(map_to_json(m)));
  }
}

TEST_CASE("inside runs start with an outside run") {
  const auto m =
      generate_map(MapCase::kConstant, rankone::testing::closed_box({3, 3}, {0.0, 0.0}));
  const auto j = map_to_json(m);
  CHECK(j["inside"] == Json::array({0, 9}));
  CHECK(j["basepoint"] == Json::array({0, 0}));
  CHECK(j["values"].size() == 18u);
}

TEST_CASE("map file round trip is exact") {
  const auto m = generate_map(MapCase::kSaddleReeb, rankone::testing::open_box(21));
  const auto path =
      (std::filesystem::temp_directory_path() / "rankone_map_io_test.json")
          .string();
  save_map(m, path);
  check_same(m, load_map(path));
  save_map(load_map(path), path + ".2");
  CHECK(read_json_file(path) == read_json_file(path + ".2"));
  std::remove(path.c_str());
  std::remove((path + ".2").c_str());
}

TEST_CASE("malformed map files") {
  const auto m = generate_map(MapCase::kConstant, rankone::testing::open_box(9));
  auto j = map_to_json(m);
  j["version"] = 99;
  CHECK(error_code([&] { map_from_json(j); }) == ErrorCode::kFormat);

  j = map_to_json(m);
  j.erase("values");
  CHECK(error_code([&] { map_from_json(j); }) == ErrorCode::kFormat);

  j = map_to_json(m);
  j["values"].erase(0);
  CHECK(error_code([&] { map_from_json(j); }) == ErrorCode::kFormat);

  CHECK(error_code([] { load_map("/nonexistent/rankone.json"); }) ==
        ErrorCode::kFormat);
}
