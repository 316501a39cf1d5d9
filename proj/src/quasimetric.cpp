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

#include "rankone/quasimetric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "rankone/error.hpp"

namespace rankone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Offsets in {-1,0,1}^n whose first nonzero entry is +1.
std::vector<std::array<int, kMaxDim>> forward_offsets(int n, bool diagonals) {
  std::vector<std::array<int, kMaxDim>> out;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::array<int, kMaxDim> off{};
    int c = code;
    int nonzero = 0;
    int first = 0;
    for (int a = 0; a < n; ++a) {
      off[a] = c % 3 - 1;
      c /= 3;
    }
    for (int a = 0; a < n; ++a) {
      if (off[a] != 0) {
        if (nonzero == 0) first = off[a];
        ++nonzero;
      }
    }
    if (nonzero == 0 || first < 0) continue;
    if (!diagonals && nonzero > 1) continue;
    out.push_back(off);
  }
  std::sort(out.begin(), out.end(), [n](const auto& x, const auto& y) {
    const int nx = static_cast<int>(std::count_if(
        x.begin(), x.begin() + n, [](int v) { return v != 0; }));
    const int ny = static_cast<int>(std::count_if(
        y.begin(), y.begin() + n, [](int v) { return v != 0; }));
    if (nx != ny) return nx < ny;
    return std::lexicographical_compare(y.begin(), y.begin() + n, x.begin(),
                                        x.begin() + n);
  });
  return out;
}

void check_node(const QuasiMetricGraph& graph, NodeId node) {
  if (!graph.contains(node)) {
    throw Error(ErrorCode::kNodeNotInGraph,
                "node " + std::to_string(node) + " is not in the graph");
  }
}

}  // namespace

QuasiMetricGraph::QuasiMetricGraph(std::size_t node_count,
                                   std::vector<GraphEdge> edges)
    : edges_(std::move(edges)) {
  offsets_.assign(node_count + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
    max_image_weight_ = std::max(max_image_weight_, e.image_weight);
  }
  for (std::size_t i = 0; i < node_count; ++i) offsets_[i + 1] += offsets_[i];
  arcs_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    arcs_[fill[e.u]++] = Arc{e.v, k, e.image_weight};
    arcs_[fill[e.v]++] = Arc{e.u, k, e.image_weight};
  }
}

QuasiMetricGraph build_weight_graph(const SampledMap& map, int subdivision,
                                    bool diagonals) {
  if (subdivision < 1) {
    throw Error(ErrorCode::kInvalidArgument, "subdivision must be >= 1");
  }
  const GridDomain& d = map.domain();
  const int n = d.dim();
  const int m = map.codim();
  const auto offsets = forward_offsets(n, diagonals);

  std::vector<GraphEdge> edges;
  std::vector<NodeId> corners;
  std::vector<double> prev(m), cur(m);
  std::array<int, kMaxDim> sub{};
  for (NodeId u = 0; u < static_cast<NodeId>(d.node_count()); ++u) {
    const std::size_t fu = d.flat_of(u);
    for (const auto& off : offsets) {
      std::vector<int> axes;
      for (int a = 0; a < n; ++a) {
        if (off[a] != 0) axes.push_back(a);
      }
      const int k = static_cast<int>(axes.size());
      // Corner c has bit i set when it is displaced along axes[i].
      corners.assign(std::size_t{1} << k, -1);
      bool ok = true;
      for (std::size_t c = 0; c < corners.size() && ok; ++c) {
        sub.fill(0);
        for (int i = 0; i < k; ++i) {
          if ((c >> i) & 1) sub[axes[i]] = off[axes[i]];
        }
        const auto f = d.shifted(fu, std::span<const int>(sub.data(), n));
        corners[c] = f < 0 ? -1 : d.node_of(static_cast<std::size_t>(f));
        if (corners[c] < 0) ok = false;
      }
      if (!ok) continue;

      GraphEdge e;
      e.u = u;
      e.v = corners.back();
      double len2 = 0.0;
      for (int a : axes) len2 += d.spacing()[a] * d.spacing()[a];
      e.euclid_weight = std::sqrt(len2);

      const auto fa = map.value(u);
      const auto fb = map.value(e.v);
      if (k == 1) {
        // Linear along an axis edge: subdivision does not change the sum.
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += (fb[j] - fa[j]) * (fb[j] - fa[j]);
        e.image_weight = std::sqrt(s);
      } else {
        std::copy(fa.begin(), fa.end(), prev.begin());
        double total = 0.0;
        for (int i = 1; i <= subdivision; ++i) {
          const double t = static_cast<double>(i) / subdivision;
          std::fill(cur.begin(), cur.end(), 0.0);
          for (std::size_t c = 0; c < corners.size(); ++c) {
            const int bits = std::popcount(c);
            const double w = std::pow(t, bits) * std::pow(1.0 - t, k - bits);
            if (w == 0.0) continue;
            const auto fc = map.value(corners[c]);
            for (int j = 0; j < m; ++j) cur[j] += w * fc[j];
          }
          double s = 0.0;
          for (int j = 0; j < m; ++j) s += (cur[j] - prev[j]) * (cur[j] - prev[j]);
          total += std::sqrt(s);
          prev.swap(cur);
        }
        e.image_weight = total;
      }
      edges.push_back(e);
    }
  }
  return QuasiMetricGraph(d.node_count(), std::move(edges));
}

MultiSourceResult df_multisource(const QuasiMetricGraph& graph,
                                 std::span<const NodeId> sources) {
  if (sources.empty()) {
    throw Error(ErrorCode::kEmptySourceSet, "no sources given");
  }
  const std::size_t count = graph.node_count();
  MultiSourceResult r;
  r.distance.assign(count, kInf);
  r.nearest.assign(count, -1);
  r.predecessor.assign(count, -1);

  using Label = std::tuple<double, NodeId, NodeId>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  for (NodeId s : sources) {
    check_node(graph, s);
    if (r.nearest[s] == -1 || s < r.nearest[s]) {
      r.distance[s] = 0.0;
      r.nearest[s] = s;
      heap.emplace(0.0, s, s);
    }
  }
  while (!heap.empty()) {
    const auto [dist, src, u] = heap.top();
    heap.pop();
    if (dist != r.distance[u] || src != r.nearest[u]) continue;
    for (const Arc& arc : graph.arcs(u)) {
      const double nd = dist + arc.weight;
      const NodeId v = arc.to;
      if (nd < r.distance[v] || (nd == r.distance[v] && src < r.nearest[v])) {
        r.distance[v] = nd;
        r.nearest[v] = src;
        r.predecessor[v] = u;
        heap.emplace(nd, src, v);
      }
    }
  }
  return r;
}

std::vector<double> df_single_source(const QuasiMetricGraph& graph,
                                     NodeId source) {
  const NodeId s[] = {source};
  return df_multisource(graph, s).distance;
}

double df_distance(const QuasiMetricGraph& graph, NodeId source,
                   NodeId target) {
  check_node(graph, target);
  return df_single_source(graph, source)[target];
}

std::vector<double> df_all_pairs(const QuasiMetricGraph& graph) {
  const std::size_t count = graph.node_count();
  std::vector<double> out;
  out.reserve(count * count);
  for (NodeId s = 0; s < static_cast<NodeId>(count); ++s) {
    const auto row = df_single_source(graph, s);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

Json graph_to_json(const QuasiMetricGraph& graph, const GridDomain& domain) {
  Json j;
  Json nodes = Json::array();
  for (NodeId v = 0; v < static_cast<NodeId>(graph.node_count()); ++v) {
    nodes.push_back(domain.node_point(v));
  }
  Json edges = Json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back(Json::array({e.u, e.v, e.image_weight, e.euclid_weight}));
  }
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace rankone
