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

#include "rankone/finite_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include "rankone/error.hpp"

namespace rankone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_class(const QuotientTree& zf, ClassId c) {
  if (!zf.contains(c)) {
    throw Error(ErrorCode::kUnknownClass,
                "class " + std::to_string(c) + " does not exist");
  }
}

void index_classes(FiniteTree& tree, std::size_t class_count) {
  tree.class_point.assign(class_count, TreePoint{-1, -1.0});
  if (tree.edges.empty()) {
    for (ClassId v : tree.vertices) tree.class_point[v] = TreePoint{-1, 0.0};
    return;
  }
  for (int k = 0; k < static_cast<int>(tree.edges.size()); ++k) {
    const auto& e = tree.edges[k];
    for (std::size_t i = 0; i < e.class_path.size(); ++i) {
      auto& p = tree.class_point[e.class_path[i]];
      if (p.edge < 0) p = TreePoint{k, e.offsets[i]};
    }
  }
}

void recompute_offsets(TreeEdge& e, const QuotientTree& zf) {
  e.offsets.assign(e.class_path.size(), 0.0);
  for (std::size_t i = 1; i < e.class_path.size(); ++i) {
    const ClassId a = e.class_path[i - 1];
    const ClassId b = e.class_path[i];
    const double len =
        zf.parent[a] == b ? zf.parent_length[a] : zf.parent_length[b];
    e.offsets[i] = e.offsets[i - 1] + len;
  }
  e.lambda = e.offsets.back();
}

void reverse_edge(TreeEdge& e) {
  std::swap(e.u, e.v);
  std::reverse(e.class_path.begin(), e.class_path.end());
  std::reverse(e.offsets.begin(), e.offsets.end());
  for (double& o : e.offsets) o = e.lambda - o;
  e.offsets.front() = 0.0;
  e.offsets.back() = e.lambda;
}

bool is_tree(std::size_t vertex_count, const std::vector<TreeEdge>& edges,
             const std::vector<ClassId>& vertices) {
  if (edges.size() + 1 != vertex_count) return false;
  std::vector<int> parent(vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto index = [&](ClassId c) {
    return static_cast<int>(
        std::lower_bound(vertices.begin(), vertices.end(), c) -
        vertices.begin());
  };
  for (const auto& e : edges) {
    const int a = find(index(e.u));
    const int b = find(index(e.v));
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

}  // namespace

ClassDistances class_multisource(const QuotientTree& zf,
                                 std::span<const ClassId> sources) {
  if (sources.empty()) {
    throw Error(ErrorCode::kEmptySourceSet, "no source classes given");
  }
  const std::size_t count = zf.class_count();
  ClassDistances r;
  r.distance.assign(count, kInf);
  r.nearest.assign(count, -1);
  using Label = std::tuple<double, ClassId, ClassId>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  for (ClassId s : sources) {
    check_class(zf, s);
    if (r.nearest[s] == -1 || s < r.nearest[s]) {
      r.distance[s] = 0.0;
      r.nearest[s] = s;
      heap.emplace(0.0, s, s);
    }
  }
  while (!heap.empty()) {
    const auto [dist, src, c] = heap.top();
    heap.pop();
    if (dist != r.distance[c] || src != r.nearest[c]) continue;
    for (const auto& nb : zf.neighbors(c)) {
      const double nd = dist + nb.length;
      if (nd < r.distance[nb.to] ||
          (nd == r.distance[nb.to] && src < r.nearest[nb.to])) {
        r.distance[nb.to] = nd;
        r.nearest[nb.to] = src;
        heap.emplace(nd, src, nb.to);
      }
    }
  }
  return r;
}

std::vector<ClassId> build_eps_net(const QuotientTree& zf,
                                   std::span<const ClassId> region,
                                   double eps) {
  if (region.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "region is empty");
  }
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  }
  for (ClassId c : region) check_class(zf, c);
  std::vector<ClassId> net;
  const bool root_in_region =
      std::find(region.begin(), region.end(), zf.root) != region.end();
  net.push_back(root_in_region ? zf.root
                               : *std::min_element(region.begin(),
                                                   region.end()));
  std::vector<double> cover(zf.class_count(), kInf);
  for (;;) {
    const ClassId last[] = {net.back()};
    const auto d = class_multisource(zf, last).distance;
    for (std::size_t c = 0; c < cover.size(); ++c) {
      cover[c] = std::min(cover[c], d[c]);
    }
    ClassId best = -1;
    double best_distance = -1.0;
    for (ClassId c : region) {
      if (cover[c] > best_distance ||
          (cover[c] == best_distance && c < best)) {
        best = c;
        best_distance = cover[c];
      }
    }
    if (best_distance < eps) break;
    net.push_back(best);
  }
  return net;
}

FiniteTree build_subtree(const QuotientTree& zf, std::span<const ClassId> net) {
  if (net.empty()) throw Error(ErrorCode::kInvalidArgument, "net is empty");
  for (ClassId c : net) check_class(zf, c);
  std::vector<ClassId> points;
  for (ClassId c : net) {
    if (std::find(points.begin(), points.end(), c) == points.end()) {
      points.push_back(c);
    }
  }

  FiniteTree tree;
  tree.net_size = points.size();
  if (points.size() < 2) {
    tree.degenerate = true;
    tree.vertices = {points.front()};
    index_classes(tree, zf.class_count());
    return tree;
  }

  const auto count = static_cast<ClassId>(zf.class_count());
  std::vector<std::uint8_t> on_tree(count, 0), marked(count, 0);
  for (ClassId c : geodesic(zf, points[0], points[1])) on_tree[c] = 1;
  marked[points[0]] = marked[points[1]] = 1;
  for (std::size_t i = 2; i < points.size(); ++i) {
    const ClassId a = points[i];
    marked[a] = 1;
    if (on_tree[a]) continue;
    // The first class of T on the arc towards any point of T is the nearest.
    for (ClassId c : geodesic(zf, a, points[0])) {
      if (on_tree[c]) break;
      on_tree[c] = 1;
    }
  }

  auto tree_degree = [&](ClassId c) {
    int d = 0;
    for (const auto& nb : zf.neighbors(c)) d += on_tree[nb.to];
    return d;
  };
  std::vector<std::uint8_t> is_vertex(count, 0);
  for (ClassId c = 0; c < count; ++c) {
    if (on_tree[c] && (marked[c] || tree_degree(c) != 2)) {
      is_vertex[c] = 1;
      tree.vertices.push_back(c);
    }
  }

  for (ClassId u : tree.vertices) {
    for (const auto& first : zf.neighbors(u)) {
      if (!on_tree[first.to]) continue;
      TreeEdge e;
      e.u = u;
      e.class_path = {u};
      ClassId prev = u;
      ClassId cur = first.to;
      while (!is_vertex[cur]) {
        e.class_path.push_back(cur);
        ClassId next = -1;
        for (const auto& nb : zf.neighbors(cur)) {
          if (on_tree[nb.to] && nb.to != prev) next = nb.to;
        }
        prev = cur;
        cur = next;
      }
      e.class_path.push_back(cur);
      e.v = cur;
      if (e.u < e.v) {
        recompute_offsets(e, zf);
        tree.edges.push_back(std::move(e));
      }
    }
  }

  // Merge edges too short to carry a clamp.
  for (;;) {
    auto it = std::find_if(tree.edges.begin(), tree.edges.end(),
                           [](const TreeEdge& e) {
                             return e.lambda < kShortEdgeLength;
                           });
    if (it == tree.edges.end() || tree.edges.size() == 1) break;
    tree.merged_short_edges = true;
    const TreeEdge gone = *it;
    tree.edges.erase(it);
    for (auto& e : tree.edges) {
      if (e.v == gone.v) reverse_edge(e);
      if (e.u == gone.v) {
        std::vector<ClassId> path = gone.class_path;
        path.insert(path.end(), e.class_path.begin() + 1, e.class_path.end());
        e.class_path = std::move(path);
        e.u = gone.u;
        recompute_offsets(e, zf);
      }
    }
    tree.vertices.erase(
        std::find(tree.vertices.begin(), tree.vertices.end(), gone.v));
  }

  if (!is_tree(tree.vertices.size(), tree.edges, tree.vertices)) {
    throw Error(ErrorCode::kCycleDetected, "subtree is not a tree");
  }
  const std::size_t k = tree.net_size;
  if (tree.vertices.size() > 2 * k - 2 || tree.edges.size() > 2 * k - 3) {
    throw Error(ErrorCode::kCycleDetected, "subtree exceeds 2k-2 vertices");
  }
  tree.lambda_min = kInf;
  for (const auto& e : tree.edges) {
    tree.lambda_min = std::min(tree.lambda_min, e.lambda);
  }
  tree.ordering.resize(tree.edges.size());
  std::iota(tree.ordering.begin(), tree.ordering.end(), 0);
  index_classes(tree, zf.class_count());
  return tree;
}

FiniteTree order_edges(FiniteTree tree) {
  const std::size_t count = tree.edges.size();
  if (count == 0) return tree;
  std::vector<std::vector<int>> incident(tree.vertices.size());
  auto index = [&](ClassId c) {
    return static_cast<std::size_t>(
        std::lower_bound(tree.vertices.begin(), tree.vertices.end(), c) -
        tree.vertices.begin());
  };
  for (int k = 0; k < static_cast<int>(count); ++k) {
    incident[index(tree.edges[k].u)].push_back(k);
    incident[index(tree.edges[k].v)].push_back(k);
  }
  std::vector<std::uint8_t> used(count, 0), reached(tree.vertices.size(), 0);
  std::vector<TreeEdge> ordered;
  std::vector<int> ordering;
  ordered.push_back(tree.edges[0]);
  ordering.push_back(tree.ordering[0]);
  used[0] = 1;
  std::queue<ClassId> queue;
  for (ClassId c : {tree.edges[0].u, tree.edges[0].v}) {
    reached[index(c)] = 1;
    queue.push(c);
  }
  while (!queue.empty()) {
    const ClassId c = queue.front();
    queue.pop();
    for (int k : incident[index(c)]) {
      if (used[k]) continue;
      used[k] = 1;
      TreeEdge e = tree.edges[k];
      if (e.u != c) reverse_edge(e);
      if (reached[index(e.v)]) {
        throw Error(ErrorCode::kCycleDetected, "edge closes a cycle");
      }
      reached[index(e.v)] = 1;
      queue.push(e.v);
      ordered.push_back(std::move(e));
      ordering.push_back(tree.ordering[k]);
    }
  }
  if (ordered.size() != count) {
    throw Error(ErrorCode::kOrderingViolation, "tree is not connected");
  }
  tree.edges = std::move(ordered);
  tree.ordering = std::move(ordering);
  index_classes(tree, tree.class_point.size());
  return tree;
}

Retraction retract(const QuotientTree& zf, const FiniteTree& tree) {
  std::vector<ClassId> sources;
  for (ClassId c = 0; c < static_cast<ClassId>(zf.class_count()); ++c) {
    if (tree.on_tree(c)) sources.push_back(c);
  }
  const auto d = class_multisource(zf, sources);
  Retraction r;
  r.nearest = d.nearest;
  r.displacement = d.distance;
  r.to_tree.resize(zf.class_count());
  for (std::size_t c = 0; c < zf.class_count(); ++c) {
    r.to_tree[c] = tree.class_point[d.nearest[c]];
  }
  return r;
}

double tree_point_distance(const QuotientTree& zf, const FiniteTree& tree,
                           TreePoint p, TreePoint q) {
  if (p.edge < 0 || q.edge < 0) return 0.0;
  if (p.edge == q.edge) return std::abs(p.offset - q.offset);
  const auto& ep = tree.edges[p.edge];
  const auto& eq = tree.edges[q.edge];
  const std::pair<ClassId, double> a[2] = {{ep.u, p.offset},
                                           {ep.v, ep.lambda - p.offset}};
  const std::pair<ClassId, double> b[2] = {{eq.u, q.offset},
                                           {eq.v, eq.lambda - q.offset}};
  double best = kInf;
  for (const auto& [ca, da] : a) {
    for (const auto& [cb, db] : b) {
      best = std::min(best, da + quotient_distance(zf, ca, cb) + db);
    }
  }
  return best;
}

Json finite_tree_to_json(const FiniteTree& tree) {
  Json j;
  j["vertices"] = tree.vertices;
  Json edges = Json::array();
  for (const auto& e : tree.edges) {
    Json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["lambda"] = e.lambda;
    je["class_path"] = e.class_path;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  j["ordering"] = tree.ordering;
  j["lambda_min"] = tree.edges.empty() ? 0.0 : tree.lambda_min;
  j["degenerate"] = tree.degenerate;
  j["merged_short_edges"] = tree.merged_short_edges;
  return j;
}

}  // namespace rankone
