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

#include "rankone/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "rankone/error.hpp"

namespace rankone {

Embedding embed_tree(const FiniteTree& tree) {
  Embedding emb;
  emb.E = static_cast<int>(tree.edges.size());
  emb.vertices = tree.vertices;
  emb.vertex_images.assign(tree.vertices.size(), {});
  auto index = [&](ClassId c) {
    return static_cast<std::size_t>(
        std::lower_bound(tree.vertices.begin(), tree.vertices.end(), c) -
        tree.vertices.begin());
  };
  if (emb.E == 0) {
    for (auto& img : emb.vertex_images) img.clear();
    return emb;
  }
  emb.vertex_images[index(tree.edges[0].u)].assign(emb.E, 0.0);
  for (int k = 0; k < emb.E; ++k) {
    const auto& e = tree.edges[k];
    const auto& from = emb.vertex_images[index(e.u)];
    if (from.empty()) {
      throw Error(ErrorCode::kOrderingViolation,
                  "edge " + std::to_string(k) + " starts outside T_{k-1}");
    }
    emb.base.push_back(from);
    emb.lambda.push_back(e.lambda);
    std::vector<double> to = from;
    to[k] += e.lambda;
    emb.vertex_images[index(e.v)] = std::move(to);
  }
  return emb;
}

std::vector<double> embed_point(const Embedding& emb, TreePoint p) {
  if (p.edge < 0) return std::vector<double>(emb.E, 0.0);
  if (p.edge >= emb.E) {
    throw Error(ErrorCode::kInvalidArgument, "edge index out of range");
  }
  if (!(p.offset >= 0.0 && p.offset <= emb.lambda[p.edge])) {
    throw Error(ErrorCode::kOffsetOutOfRange,
                "offset " + std::to_string(p.offset) + " outside [0, " +
                    std::to_string(emb.lambda[p.edge]) + "]");
  }
  std::vector<double> x = emb.base[p.edge];
  x[p.edge] += p.offset;
  return x;
}

EmbeddingCheck tree_l1_check(
    const QuotientTree& zf, const FiniteTree& tree, const Embedding& emb,
    std::span<const std::pair<TreePoint, TreePoint>> pairs) {
  EmbeddingCheck check;
  for (const auto& [p, q] : pairs) {
    const double d = tree_point_distance(zf, tree, p, q);
    const auto wp = embed_point(emb, p);
    const auto wq = embed_point(emb, q);
    double l1 = 0.0, l2 = 0.0;
    for (int j = 0; j < emb.E; ++j) {
      const double diff = std::abs(wp[j] - wq[j]);
      l1 += diff;
      l2 += diff * diff;
    }
    l2 = std::sqrt(l2);
    check.l1_defect = std::max(check.l1_defect, std::abs(d - l1));
    check.lipschitz_defect = std::max(check.lipschitz_defect, l2 - d);
    if (l2 > 0.0) {
      check.inverse_lipschitz = std::max(check.inverse_lipschitz, d / l2);
    }
    ++check.pairs;
  }
  return check;
}

TreePoint random_tree_point(const FiniteTree& tree, Rng& rng) {
  if (tree.edges.empty()) return TreePoint{-1, 0.0};
  const auto k = static_cast<int>(uniform_index(rng, tree.edges.size()));
  return TreePoint{k, uniform_real(rng, 0.0, tree.edges[k].lambda)};
}

Json embedding_to_json(const Embedding& emb) {
  Json j;
  j["E"] = emb.E;
  Json edges = Json::array();
  for (int k = 0; k < emb.E; ++k) {
    Json e;
    e["axis"] = k;
    e["base"] = emb.base[k];
    e["lambda"] = emb.lambda[k];
    edges.push_back(std::move(e));
  }
  j["edges"] = std::move(edges);
  Json vertices = Json::array();
  for (std::size_t i = 0; i < emb.vertices.size(); ++i) {
    Json v;
    v["class"] = emb.vertices[i];
    v["image"] = emb.vertex_images[i];
    vertices.push_back(std::move(v));
  }
  j["vertices"] = std::move(vertices);
  return j;
}

}  // namespace rankone
