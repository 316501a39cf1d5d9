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

#include "rankone/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankone/error.hpp"
#include "rankone/random.hpp"

namespace rankone {
namespace {

struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  NodeId find(NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

void check_class(const QuotientTree& zf, ClassId c) {
  if (!zf.contains(c)) {
    throw Error(ErrorCode::kUnknownClass,
                "class " + std::to_string(c) + " does not exist");
  }
}

}  // namespace

void QuotientTree::finalize() {
  const auto count = static_cast<ClassId>(class_count());
  std::vector<std::vector<ClassId>> children(count);
  for (ClassId c = 0; c < count; ++c) {
    if (parent[c] >= 0) children[parent[c]].push_back(c);
  }
  adjacency_offsets.assign(count + 1, 0);
  adjacency.clear();
  for (ClassId c = 0; c < count; ++c) {
    if (parent[c] >= 0) adjacency.push_back({parent[c], parent_length[c]});
    for (ClassId k : children[c]) adjacency.push_back({k, parent_length[k]});
    adjacency_offsets[c + 1] = adjacency.size();
  }

  // Hop levels and depths in BFS order from the root.
  hops.assign(count, -1);
  depth.assign(count, 0.0);
  std::vector<ClassId> order{root};
  hops[root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ClassId c = order[i];
    for (ClassId k : children[c]) {
      hops[k] = hops[c] + 1;
      depth[k] = depth[c] + parent_length[k];
      order.push_back(k);
    }
  }
  if (order.size() != static_cast<std::size_t>(count)) {
    throw Error(ErrorCode::kCycleDetected, "class graph is not a rooted tree");
  }

  int levels = 1;
  while ((1 << levels) < count) ++levels;
  ancestor.assign(levels, std::vector<ClassId>(count, root));
  for (ClassId c = 0; c < count; ++c) {
    ancestor[0][c] = parent[c] >= 0 ? parent[c] : root;
  }
  for (int l = 1; l < levels; ++l) {
    for (ClassId c = 0; c < count; ++c) {
      ancestor[l][c] = ancestor[l - 1][ancestor[l - 1][c]];
    }
  }
}

ClassId QuotientTree::lca(ClassId a, ClassId b) const {
  if (hops[a] < hops[b]) std::swap(a, b);
  int diff = hops[a] - hops[b];
  for (int l = 0; diff > 0; ++l, diff >>= 1) {
    if (diff & 1) a = ancestor[l][a];
  }
  if (a == b) return a;
  for (int l = static_cast<int>(ancestor.size()) - 1; l >= 0; --l) {
    if (ancestor[l][a] != ancestor[l][b]) {
      a = ancestor[l][a];
      b = ancestor[l][b];
    }
  }
  return parent[a];
}

double default_zero_threshold(const QuasiMetricGraph& graph) {
  return 1e-9 * graph.max_image_weight();
}

QuotientTree build_quotient(const QuasiMetricGraph& graph, const SampledMap& map,
                            double tau) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be non-negative");
  }
  const GridDomain& domain = map.domain();
  const auto count = static_cast<NodeId>(domain.node_count());
  if (graph.node_count() != static_cast<std::size_t>(count)) {
    throw Error(ErrorCode::kInvalidArgument, "graph and map disagree");
  }
  const NodeId base = domain.basepoint();
  const auto dist = df_single_source(graph, base);

  std::vector<NodeId> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (dist[a] != dist[b]) return dist[a] > dist[b];
    if ((a == base) != (b == base)) return b == base;
    return a < b;
  });

  // Superlevel sweep: a node joins the components of its already added axis
  // neighbors and becomes their parent in the join tree.
  const int n = domain.dim();
  UnionFind sweep(count);
  std::vector<NodeId> lowest(count, -1);
  std::vector<NodeId> tree_parent(count, -1);
  std::vector<std::uint8_t> added(count, 0);
  std::array<int, kMaxDim> off{};
  std::vector<NodeId> roots;
  for (NodeId v : order) {
    roots.clear();
    for (int a = 0; a < n; ++a) {
      for (int s : {-1, 1}) {
        off.fill(0);
        off[a] = s;
        const auto f = domain.shifted(domain.flat_of(v),
                                      std::span<const int>(off.data(), n));
        if (f < 0) continue;
        const NodeId u = domain.node_of(static_cast<std::size_t>(f));
        if (u < 0 || !added[u]) continue;
        const NodeId r = sweep.find(u);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
          roots.push_back(r);
        }
      }
    }
    for (NodeId r : roots) {
      tree_parent[lowest[r]] = v;
      sweep.parent[r] = v;
    }
    lowest[v] = v;
    added[v] = 1;
  }

  UnionFind merge(count);
  for (NodeId v = 0; v < count; ++v) {
    const NodeId p = tree_parent[v];
    if (p >= 0 && dist[v] - dist[p] <= tau &&
        norm_diff(map.value(v), map.value(p)) <= tau) {
      const NodeId rv = merge.find(v);
      const NodeId rp = merge.find(p);
      if (rv != rp) merge.parent[std::max(rv, rp)] = std::min(rv, rp);
    }
  }

  QuotientTree zf;
  zf.codim = map.codim();
  zf.zero_threshold = tau;
  zf.class_of.assign(count, -1);
  std::vector<ClassId> class_of_root(count, -1);
  for (NodeId v = 0; v < count; ++v) {
    const NodeId r = merge.find(v);
    if (class_of_root[r] < 0) {
      class_of_root[r] = static_cast<ClassId>(zf.representative.size());
      zf.representative.push_back(v);
    }
    zf.class_of[v] = class_of_root[r];
  }
  const auto classes = static_cast<ClassId>(zf.representative.size());
  zf.root = zf.class_of[base];
  zf.parent.assign(classes, -1);
  zf.parent_length.assign(classes, 0.0);
  for (NodeId v = 0; v < count; ++v) {
    const NodeId p = tree_parent[v];
    if (p < 0) continue;
    const ClassId cv = zf.class_of[v];
    const ClassId cp = zf.class_of[p];
    if (cv == cp) continue;
    if (zf.parent[cv] >= 0) {
      throw Error(ErrorCode::kCycleDetected, "class has two parents");
    }
    zf.parent[cv] = cp;
    zf.parent_length[cv] = dist[v] - dist[p];
  }

  zf.phi.resize(static_cast<std::size_t>(classes) * zf.codim);
  for (ClassId c = 0; c < classes; ++c) {
    const auto value = map.value(zf.representative[c]);
    std::copy(value.begin(), value.end(),
              zf.phi.begin() + static_cast<std::ptrdiff_t>(c) * zf.codim);
  }

  // Value spread inside a class is bounded by tau per contracted arc.
  double scale = 1.0;
  for (double x : map.values()) scale = std::max(scale, std::abs(x));
  std::vector<std::size_t> size(classes, 0);
  for (NodeId v = 0; v < count; ++v) ++size[zf.class_of[v]];
  for (NodeId v = 0; v < count; ++v) {
    const ClassId c = zf.class_of[v];
    const double spread = norm_diff(map.value(v), zf.phi_of(c));
    const double allowed = tau * static_cast<double>(size[c]) + 1e-9 * scale;
    if (spread > allowed) {
      throw Error(ErrorCode::kInconsistentClass,
                  "class " + std::to_string(c) + " has value spread " +
                      std::to_string(spread) + "; tau is too large");
    }
  }

  zf.finalize();
  return zf;
}

double quotient_distance(const QuotientTree& zf, ClassId a, ClassId b) {
  check_class(zf, a);
  check_class(zf, b);
  if (a == b) return 0.0;
  const ClassId l = zf.lca(a, b);
  return std::max(0.0, zf.depth[a] + zf.depth[b] - 2.0 * zf.depth[l]);
}

std::vector<ClassId> geodesic(const QuotientTree& zf, ClassId a, ClassId b) {
  check_class(zf, a);
  check_class(zf, b);
  const ClassId l = zf.lca(a, b);
  std::vector<ClassId> up;
  for (ClassId c = a; c != l; c = zf.parent[c]) up.push_back(c);
  up.push_back(l);
  std::vector<ClassId> down;
  for (ClassId c = b; c != l; c = zf.parent[c]) down.push_back(c);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

double four_point_defect(double s1, double s2, double s3) {
  double s[3] = {s1, s2, s3};
  std::sort(s, s + 3);
  return s[2] - s[1];
}

TreeCheckReport check_tree(const QuotientTree& zf,
                           std::span<const ClassId> pool, std::size_t samples,
                           double tol, std::uint64_t seed) {
  TreeCheckReport report;
  if (pool.empty()) {
    report.pass = true;
    return report;
  }
  Rng rng(seed);
  auto tree = [&](ClassId a, ClassId b) { return quotient_distance(zf, a, b); };
  auto image = [&](ClassId a, ClassId b) {
    return norm_diff(zf.phi_of(a), zf.phi_of(b));
  };
  for (std::size_t s = 0; s < samples; ++s) {
    ClassId q[4];
    for (auto& c : q) c = pool[uniform_index(rng, pool.size())];
    double t[4][4], m[4][4];
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        t[i][j] = t[j][i] = tree(q[i], q[j]);
        const double im = image(q[i], q[j]);
        m[i][j] = m[j][i] = std::max(t[i][j], im);
        report.phi_lipschitz_defect =
            std::max(report.phi_lipschitz_defect, im - t[i][j]);
      }
    }
    report.tree_metric_defect = std::max(
        report.tree_metric_defect,
        four_point_defect(t[0][1] + t[2][3], t[0][2] + t[1][3],
                          t[0][3] + t[1][2]));
    report.max_four_point_defect = std::max(
        report.max_four_point_defect,
        four_point_defect(m[0][1] + m[2][3], m[0][2] + m[1][3],
                          m[0][3] + m[1][2]));
  }
  report.quadruples_tested = samples;
  report.pass = report.max_four_point_defect <= tol;
  return report;
}

TreeCheckReport check_tree(const QuotientTree& zf, std::size_t samples,
                           double tol, std::uint64_t seed) {
  std::vector<ClassId> all(zf.class_count());
  std::iota(all.begin(), all.end(), 0);
  return check_tree(zf, all, samples, tol, seed);
}

Json quotient_to_json(const QuotientTree& zf) {
  Json j;
  j["classes"] = zf.class_of;
  j["representatives"] = zf.representative;
  Json edges = Json::array();
  for (ClassId c = 0; c < static_cast<ClassId>(zf.class_count()); ++c) {
    if (zf.parent[c] >= 0) {
      edges.push_back(Json::array({zf.parent[c], c, zf.parent_length[c]}));
    }
  }
  j["edges"] = std::move(edges);
  Json phi = Json::array();
  for (ClassId c = 0; c < static_cast<ClassId>(zf.class_count()); ++c) {
    const auto v = zf.phi_of(c);
    phi.push_back(std::vector<double>(v.begin(), v.end()));
  }
  j["phi"] = std::move(phi);
  j["zero_threshold"] = zf.zero_threshold;
  j["root"] = zf.root;
  return j;
}

}  // namespace rankone
