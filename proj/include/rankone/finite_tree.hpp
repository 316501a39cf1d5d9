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

#include <cstdint>
#include <span>
#include <vector>

#include "rankone/map_io.hpp"
#include "rankone/quotient.hpp"

namespace rankone {

inline constexpr double kShortEdgeLength = 1e-9;

// A point of T: `offset` along edge `edge`, measured from its u endpoint.
// edge = -1 denotes the single vertex of a degenerate tree.
struct TreePoint {
  int edge = -1;
  double offset = 0.0;
};

struct TreeEdge {
  ClassId u = 0;
  ClassId v = 0;
  double lambda = 0.0;
  // Classes from u to v inclusive, with their offsets from u.
  std::vector<ClassId> class_path;
  std::vector<double> offsets;
};

struct FiniteTree {
  std::vector<ClassId> vertices;
  std::vector<TreeEdge> edges;
  // ordering[k] is the index, before ordering, of the k-th edge.
  std::vector<int> ordering;
  double lambda_min = 0.0;
  std::size_t net_size = 0;
  // Set when the net had fewer than two points.
  bool degenerate = false;
  // Set when edges shorter than kShortEdgeLength were merged away.
  bool merged_short_edges = false;
  // class -> point of T, edge = -1 and offset = -1 for classes off T.
  std::vector<TreePoint> class_point;

  std::size_t edge_count() const { return edges.size(); }
  bool on_tree(ClassId c) const { return class_point[c].offset >= 0.0; }
};

// Greedy farthest-point net of `region`, started at the root class. Ties go
// to the smallest class id. Covering radius of the result is < eps.
std::vector<ClassId> build_eps_net(const QuotientTree& zf,
                                   std::span<const ClassId> region, double eps);

// Incremental union of geodesics, contracted to vertices (net points, leaves
// and branch points) and edges.
FiniteTree build_subtree(const QuotientTree& zf, std::span<const ClassId> net);

// Breadth-first order from the first edge; every edge is oriented so that u
// lies in the union of the previous edges.
FiniteTree order_edges(FiniteTree tree);

struct Retraction {
  std::vector<TreePoint> to_tree;
  // Nearest class of T.
  std::vector<ClassId> nearest;
  std::vector<double> displacement;
};

Retraction retract(const QuotientTree& zf, const FiniteTree& tree);

// Distance in T between two of its points.
double tree_point_distance(const QuotientTree& zf, const FiniteTree& tree,
                           TreePoint p, TreePoint q);

// Multi-source shortest paths over the class tree. Ties in the nearest
// source go to the smallest class id.
struct ClassDistances {
  std::vector<double> distance;
  std::vector<ClassId> nearest;
};
ClassDistances class_multisource(const QuotientTree& zf,
                                 std::span<const ClassId> sources);

Json finite_tree_to_json(const FiniteTree& tree);

}  // namespace rankone
