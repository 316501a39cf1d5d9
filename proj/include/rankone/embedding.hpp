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

#include <span>
#include <utility>
#include <vector>

#include "rankone/finite_tree.hpp"
#include "rankone/map_io.hpp"
#include "rankone/random.hpp"

namespace rankone {

// w: T -> R^E. Edge k runs from base[k] along the k-th coordinate axis.
struct Embedding {
  int E = 0;
  std::vector<std::vector<double>> base;
  std::vector<double> lambda;
  // Images of tree.vertices, same order.
  std::vector<ClassId> vertices;
  std::vector<std::vector<double>> vertex_images;
};

Embedding embed_tree(const FiniteTree& tree);

std::vector<double> embed_point(const Embedding& emb, TreePoint p);

struct EmbeddingCheck {
  std::size_t pairs = 0;
  // max |d_T(p,q) - |w(p) - w(q)|_1|
  double l1_defect = 0.0;
  // max |w(p) - w(q)|_2 - d_T(p,q)
  double lipschitz_defect = 0.0;
  // max d_T(p,q) / |w(p) - w(q)|_2 over pairs with distinct images
  double inverse_lipschitz = 0.0;
};

EmbeddingCheck tree_l1_check(const QuotientTree& zf, const FiniteTree& tree,
                             const Embedding& emb,
                             std::span<const std::pair<TreePoint, TreePoint>> pairs);

// Uniform edge index, then uniform offset along it.
TreePoint random_tree_point(const FiniteTree& tree, Rng& rng);

Json embedding_to_json(const Embedding& emb);

}  // namespace rankone
