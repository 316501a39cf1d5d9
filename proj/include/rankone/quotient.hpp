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
#include "rankone/quasimetric.hpp"

namespace rankone {

using ClassId = std::int32_t;

// Z_f as a rooted tree of classes. The root is the class of the basepoint.
struct QuotientTree {
  int codim = 0;
  double zero_threshold = 0.0;
  ClassId root = 0;
  // psi: node -> class.
  std::vector<ClassId> class_of;
  // Smallest node id in each class; class ids follow this order.
  std::vector<NodeId> representative;
  // -1 at the root.
  std::vector<ClassId> parent;
  // Length of the edge to the parent, 0 at the root.
  std::vector<double> parent_length;
  // Distance from the root.
  std::vector<double> depth;
  // phi: codim entries per class.
  std::vector<double> phi;

  std::size_t class_count() const { return representative.size(); }
  std::span<const double> phi_of(ClassId c) const {
    return {phi.data() + static_cast<std::size_t>(c) * codim,
            static_cast<std::size_t>(codim)};
  }
  bool contains(ClassId c) const {
    return c >= 0 && static_cast<std::size_t>(c) < class_count();
  }

  // Neighbors in the class graph with edge lengths, children in id order
  // after the parent.
  struct Neighbor {
    ClassId to;
    double length;
  };
  std::span<const Neighbor> neighbors(ClassId c) const {
    return {adjacency.data() + adjacency_offsets[c],
            adjacency.data() + adjacency_offsets[c + 1]};
  }
  ClassId lca(ClassId a, ClassId b) const;

  // Filled by finalize().
  std::vector<std::size_t> adjacency_offsets;
  std::vector<Neighbor> adjacency;
  std::vector<int> hops;
  std::vector<std::vector<ClassId>> ancestor;

  // Builds adjacency, hop levels and the ancestor table from parent.
  void finalize();
};

// Default zero threshold: 1e-9 times the largest edge image weight.
double default_zero_threshold(const QuasiMetricGraph& graph);

// Join tree of D = d_f(x_o, .) over the axis adjacency of the domain. Arcs
// whose length and value gap are both <= tau are contracted into classes.
QuotientTree build_quotient(const QuasiMetricGraph& graph, const SampledMap& map,
                            double tau);

double quotient_distance(const QuotientTree& zf, ClassId a, ClassId b);

// Classes from a to b along the unique arc.
std::vector<ClassId> geodesic(const QuotientTree& zf, ClassId a, ClassId b);

struct TreeCheckReport {
  std::size_t quadruples_tested = 0;
  // Four-point defect of max(d_T, |phi(a) - phi(b)|).
  double max_four_point_defect = 0.0;
  // Four-point defect of d_T alone.
  double tree_metric_defect = 0.0;
  // max over sampled pairs of |phi(a) - phi(b)| - d_T(a, b).
  double phi_lipschitz_defect = 0.0;
  bool pass = false;
};

// Four-point defect of three pair sums: largest minus second largest.
double four_point_defect(double s1, double s2, double s3);

TreeCheckReport check_tree(const QuotientTree& zf, std::size_t samples,
                           double tol, std::uint64_t seed);

// Samples quadruples from `pool` instead of all classes.
TreeCheckReport check_tree(const QuotientTree& zf,
                           std::span<const ClassId> pool, std::size_t samples,
                           double tol, std::uint64_t seed);

Json quotient_to_json(const QuotientTree& zf);

}  // namespace rankone
