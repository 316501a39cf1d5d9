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

#include "rankone/grid.hpp"
#include "rankone/map_io.hpp"

namespace rankone {

struct GraphEdge {
  NodeId u = 0;
  NodeId v = 0;
  double image_weight = 0.0;
  double euclid_weight = 0.0;
};

struct Arc {
  NodeId to = 0;
  std::uint32_t edge = 0;
  double weight = 0.0;
};

// Grid graph over the inside nodes with image arc-length weights.
class QuasiMetricGraph {
 public:
  QuasiMetricGraph() = default;
  QuasiMetricGraph(std::size_t node_count, std::vector<GraphEdge> edges);

  std::size_t node_count() const { return offsets_.size() - 1; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::span<const Arc> arcs(NodeId node) const {
    return {arcs_.data() + offsets_[node],
            arcs_.data() + offsets_[node + 1]};
  }
  double max_image_weight() const { return max_image_weight_; }
  bool contains(NodeId node) const {
    return node >= 0 && static_cast<std::size_t>(node) < node_count();
  }

 private:
  std::vector<GraphEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Arc> arcs_;
  double max_image_weight_ = 0.0;
};

// Edge weight = sum of |f(p_{i+1}) - f(p_i)| over `subdivision` equal pieces
// of the segment, f interpolated multilinearly in the cell the segment spans.
// With `diagonals`, face and body diagonals of cells whose corners are all
// inside are added.
QuasiMetricGraph build_weight_graph(const SampledMap& map, int subdivision = 1,
                                    bool diagonals = false);

double df_distance(const QuasiMetricGraph& graph, NodeId source,
                   NodeId target);

std::vector<double> df_single_source(const QuasiMetricGraph& graph,
                                     NodeId source);

struct MultiSourceResult {
  std::vector<double> distance;
  std::vector<NodeId> nearest;
  // Previous node on a shortest path, -1 at sources.
  std::vector<NodeId> predecessor;
};

// Ties in the nearest source go to the smallest source id.
MultiSourceResult df_multisource(const QuasiMetricGraph& graph,
                                 std::span<const NodeId> sources);

// Row-major node_count x node_count matrix.
std::vector<double> df_all_pairs(const QuasiMetricGraph& graph);

Json graph_to_json(const QuasiMetricGraph& graph, const GridDomain& domain);

}  // namespace rankone
