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

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankone/error.hpp"
#include "rankone/smoothing.hpp"

namespace rankone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int vertex_index(const Embedding& emb, ClassId c) {
  return static_cast<int>(
      std::lower_bound(emb.vertices.begin(), emb.vertices.end(), c) -
      emb.vertices.begin());
}

}  // namespace

TreeMollifier::TreeMollifier(const QuotientTree& zf, const FiniteTree& tree,
                             const Embedding& emb, TreeSamples samples,
                             double sigma)
    : emb_(emb), samples_(std::move(samples)), sigma_(sigma) {
  const std::size_t v = emb_.vertices.size();
  vdist_.assign(v * v, 0.0);
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      vdist_[a * v + b] = vdist_[b * v + a] =
          quotient_distance(zf, emb_.vertices[a], emb_.vertices[b]);
    }
  }
  for (const auto& e : tree.edges) {
    edge_vertex_.push_back({vertex_index(emb_, e.u), vertex_index(emb_, e.v)});
  }
  init_kernels();
}

TreeMollifier::TreeMollifier(Embedding emb,
                             std::vector<std::array<int, 2>> edge_vertex,
                             std::vector<double> vertex_distances,
                             TreeSamples samples, double sigma)
    : emb_(std::move(emb)),
      edge_vertex_(std::move(edge_vertex)),
      vdist_(std::move(vertex_distances)),
      samples_(std::move(samples)),
      sigma_(sigma) {
  init_kernels();
}

void TreeMollifier::init_kernels() {
  const GridDomain& d = samples_.embedded.domain();
  kernels_.clear();
  for (double h : d.spacing()) kernels_.emplace_back(h, sigma_);
  source_ = nearest_inside(d);
}

TreePoint TreeMollifier::locate(std::span<const double> x,
                                std::span<double> gradient) const {
  const int e_count = emb_.E;
  if (e_count == 0) return TreePoint{-1, 0.0};
  const GridDomain& d = samples_.embedded.domain();
  const int n = d.dim();
  const bool want_gradient = !gradient.empty();
  const auto w = stencil_weights(d, kernels_, x, want_gradient);

  struct Support {
    double weight;
    std::array<double, kMaxDim> grad;
    TreePoint point;
  };
  std::vector<Support> support;
  // Index loop over the stencil, clamping to the array.
  std::array<int, kMaxDim> i{}, idx{};
  for (int a = 0; a < n; ++a) {
    if (w.count[a] == 0) return samples_.points[d.basepoint()];
  }
  for (;;) {
    Support s{};
    s.weight = 1.0;
    for (int a = 0; a < n; ++a) s.weight *= w.value[a][i[a]];
    bool any = s.weight != 0.0;
    if (want_gradient) {
      for (int a = 0; a < n; ++a) {
        double g = w.derivative[a][i[a]];
        for (int b = 0; b < n; ++b) {
          if (b != a) g *= w.value[b][i[b]];
        }
        s.grad[a] = g;
        any = any || g != 0.0;
      }
    }
    if (any) {
      for (int a = 0; a < n; ++a) {
        idx[a] = std::clamp(w.first[a] + i[a], 0, d.shape()[a] - 1);
      }
      const auto flat = d.flat_index(std::span<const int>(idx.data(), n));
      s.point = samples_.points[source_[flat]];
      support.push_back(s);
    }
    int a = n - 1;
    while (a >= 0 && ++i[a] == w.count[a]) i[a--] = 0;
    if (a < 0) break;
  }

  // Distances from every support point to every vertex.
  const std::size_t vcount = emb_.vertices.size();
  std::vector<double> dv(support.size() * vcount);
  for (std::size_t q = 0; q < support.size(); ++q) {
    const TreePoint p = support[q].point;
    const auto [u, v] = edge_vertex_[p.edge];
    const double lam = emb_.lambda[p.edge];
    for (std::size_t t = 0; t < vcount; ++t) {
      dv[q * vcount + t] = std::min(p.offset + vdist_[u * vcount + t],
                                    lam - p.offset + vdist_[v * vcount + t]);
    }
  }

  // On each edge the objective is a quadratic in the offset.
  int best_edge = -1;
  double best_offset = 0.0;
  double best_value = kInf;
  std::vector<double> pos(support.size());
  std::vector<double> best_pos;
  for (int k = 0; k < e_count; ++k) {
    const auto [u, v] = edge_vertex_[k];
    const double lam = emb_.lambda[k];
    double total = 0.0, moment = 0.0;
    for (std::size_t q = 0; q < support.size(); ++q) {
      const TreePoint p = support[q].point;
      if (p.edge == k) {
        pos[q] = p.offset;
      } else {
        const double du = dv[q * vcount + u];
        const double dw = dv[q * vcount + v];
        pos[q] = du <= dw ? -du : lam + dw;
      }
      total += support[q].weight;
      moment += support[q].weight * pos[q];
    }
    const double s = std::clamp(moment / total, 0.0, lam);
    double value = 0.0;
    for (std::size_t q = 0; q < support.size(); ++q) {
      value += support[q].weight * (s - pos[q]) * (s - pos[q]);
    }
    if (value < best_value) {
      best_value = value;
      best_edge = k;
      best_offset = s;
      best_pos = pos;
    }
  }

  if (want_gradient) {
    std::fill(gradient.begin(), gradient.begin() + n, 0.0);
    const double lam = emb_.lambda[best_edge];
    if (best_offset > 0.0 && best_offset < lam) {
      double total = 0.0;
      for (const auto& s : support) total += s.weight;
      for (int a = 0; a < n; ++a) {
        double g = 0.0;
        for (std::size_t q = 0; q < support.size(); ++q) {
          g += support[q].grad[a] * (best_pos[q] - best_offset);
        }
        gradient[a] = g / total;
      }
    }
  }
  return TreePoint{best_edge, best_offset};
}

void TreeMollifier::eval(std::span<const double> x,
                         std::span<double> out) const {
  const TreePoint p = locate(x);
  if (p.edge < 0) return;
  const auto& base = emb_.base[p.edge];
  std::copy(base.begin(), base.end(), out.begin());
  out[p.edge] += p.offset;
}

void TreeMollifier::jacobian(std::span<const double> x,
                             std::span<double> jac) const {
  const int n = in_dim();
  const int e = out_dim();
  std::fill(jac.begin(), jac.begin() + n * e, 0.0);
  if (e == 0) return;
  std::array<double, kMaxDim> grad{};
  const TreePoint p = locate(x, std::span<double>(grad.data(), n));
  for (int a = 0; a < n; ++a) jac[p.edge * n + a] = grad[a];
}

TreeMollifyResult mollify_tree_map(const QuotientTree& zf,
                                   const FiniteTree& tree,
                                   const Embedding& emb, TreeSamples samples,
                                   double target_sup_error,
                                   const MollifyOptions& options) {
  if (!(target_sup_error > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target must be positive");
  }
  const GridDomain& d = samples.embedded.domain();
  const int n = d.dim();
  const double hmax = *std::max_element(d.spacing().begin(), d.spacing().end());

  TreeMollifyResult result;
  // Lipschitz bound in the tree metric over axis neighbors.
  std::array<int, kMaxDim> off{};
  for (NodeId u = 0; u < static_cast<NodeId>(d.node_count()); ++u) {
    for (int a = 0; a < n; ++a) {
      off.fill(0);
      off[a] = 1;
      const auto f = d.shifted(d.flat_of(u), std::span<const int>(off.data(), n));
      if (f < 0) continue;
      const NodeId v = d.node_of(static_cast<std::size_t>(f));
      if (v < 0) continue;
      const double dist = tree_point_distance(zf, tree, samples.points[u],
                                              samples.points[v]);
      result.lipschitz_estimate =
          std::max(result.lipschitz_estimate, dist / d.spacing()[a]);
    }
  }
  double sigma = result.lipschitz_estimate > 0.0
                     ? target_sup_error / result.lipschitz_estimate
                     : hmax;
  sigma = std::min(sigma, 2.0 * hmax);

  std::vector<double> x(n), y(emb.E);
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    auto map = std::make_shared<TreeMollifier>(zf, tree, emb, samples, sigma);
    double worst = 0.0;
    for (NodeId v = 0; v < static_cast<NodeId>(d.node_count()); ++v) {
      if (!options.check_region.empty() && !options.check_region[v]) continue;
      d.point(d.flat_of(v), x);
      map->eval(x, y);
      const auto g = samples.embedded.value(v);
      double s = 0.0;
      for (int j = 0; j < emb.E; ++j) s += (y[j] - g[j]) * (y[j] - g[j]);
      worst = std::max(worst, std::sqrt(s));
    }
    if (worst < target_sup_error) {
      result.map = std::move(map);
      result.achieved_sup_error = worst;
      result.retries = attempt;
      return result;
    }
    sigma *= 0.5;
  }
  throw Error(ErrorCode::kCannotMeetTolerance,
              "tree mollification missed the target after retries");
}

}  // namespace rankone
