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

#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rankone/embedding.hpp"
#include "test_util.hpp"

using namespace rankone;
using rankone::testing::error_code;
using rankone::testing::hand_tree;
using rankone::testing::path_tree;

namespace {

FiniteTree tree_for(const QuotientTree& zf, std::vector<ClassId> net) {
  return order_edges(build_subtree(zf, net));
}

std::vector<double> image_of(const Embedding& emb, ClassId c) {
  for (std::size_t i = 0; i < emb.vertices.size(); ++i) {
    if (emb.vertices[i] == c) return emb.vertex_images[i];
  }
  return {};
}

}  // namespace

TEST_CASE("single edge") {
  const auto zf = path_tree({2.0});
  const auto t = tree_for(zf, {0, 1});
  const auto emb = embed_tree(t);
  CHECK(emb.E == 1);
  CHECK(image_of(emb, 0) == std::vector<double>{0.0});
  CHECK(image_of(emb, 1) == std::vector<double>{2.0});
  CHECK(embed_point(emb, {0, 0.5}) == std::vector<double>{0.5});
}

TEST_CASE("two-edge path") {
  const auto zf = path_tree({1.0, 3.0});
  const auto t = tree_for(zf, {0, 1, 2});
  REQUIRE(t.edges[0].u == 0);
  const auto emb = embed_tree(t);
  CHECK(emb.E == 2);
  CHECK(image_of(emb, 0) == std::vector<double>{0.0, 0.0});
  CHECK(image_of(emb, 1) == std::vector<double>{1.0, 0.0});
  CHECK(image_of(emb, 2) == std::vector<double>{1.0, 3.0});
  CHECK(embed_point(emb, {1, 0.0}) == std::vector<double>{1.0, 0.0});
  CHECK(embed_point(emb, {1, 3.0}) == std::vector<double>{1.0, 3.0});
  CHECK(embed_point(emb, {1, 1.5}) == std::vector<double>{1.0, 1.5});
}

TEST_CASE("star with three unit edges") {
  const auto zf = hand_tree({-1, 0, 0, 0}, {0, 1, 1, 1});
  const auto t = tree_for(zf, {1, 2, 3});
  const auto emb = embed_tree(t);
  CHECK(emb.E == 3);
  for (ClassId a = 0; a < 4; ++a) {
    for (ClassId b = 0; b < 4; ++b) {
      const auto wa = image_of(emb, a), wb = image_of(emb, b);
      double l1 = 0.0;
      for (int k = 0; k < 3; ++k) l1 += std::abs(wa[k] - wb[k]);
      CHECK(l1 == quotient_distance(zf, a, b));
    }
  }
}

TEST_CASE("embedding errors") {
  const auto zf = path_tree({1.0, 3.0});
  const auto emb = embed_tree(tree_for(zf, {0, 1, 2}));
  CHECK(error_code([&] { embed_point(emb, {0, -0.1}); }) ==
        ErrorCode::kOffsetOutOfRange);
  CHECK(error_code([&] { embed_point(emb, {1, 3.1}); }) ==
        ErrorCode::kOffsetOutOfRange);
  CHECK(error_code([&] { embed_point(emb, {2, 0.0}); }) ==
        ErrorCode::kInvalidArgument);

  FiniteTree bad;
  bad.vertices = {0, 1, 2, 3};
  bad.edges = {{0, 1, 1.0, {}, {}}, {2, 3, 1.0, {}, {}}, {1, 2, 1.0, {}, {}}};
  bad.ordering = {0, 1, 2};
  CHECK(error_code([&] { embed_tree(bad); }) == ErrorCode::kOrderingViolation);
}

TEST_CASE("l1 isometry on random points of an X tree") {
  const auto zf = hand_tree({-1, 0, 1, 0, 3, 0, 5, 0, 7},
                            {0, 1, 1, 1, 1, 1, 1, 1, 1});
  const auto t = tree_for(zf, {2, 4, 6, 8});
  const auto emb = embed_tree(t);
  Rng rng(1);
  std::vector<std::pair<TreePoint, TreePoint>> pairs;
  for (int i = 0; i < 10000; ++i) {
    pairs.emplace_back(random_tree_point(t, rng), random_tree_point(t, rng));
  }
  const auto check = tree_l1_check(zf, t, emb, pairs);
  CHECK(check.pairs == 10000u);
  CHECK(check.l1_defect <= 1e-9);
  CHECK(check.lipschitz_defect <= 1e-12);
  CHECK(check.inverse_lipschitz <= std::sqrt(4.0) + 1e-9);
  CHECK(check.inverse_lipschitz >= 1.0);
}

TEST_CASE("embedding json") {
  const auto zf = path_tree({1.0, 3.0});
  const auto j = embedding_to_json(embed_tree(tree_for(zf, {0, 1, 2})));
  CHECK(j["E"] == 2);
  REQUIRE(j["edges"].size() == 2u);
  CHECK(j["edges"][1]["lambda"] == 3.0);
  CHECK(j["edges"][1]["base"] == Json::array({1.0, 0.0}));
  CHECK(j["vertices"].size() == 3u);
}
