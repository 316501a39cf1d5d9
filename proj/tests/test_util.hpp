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

#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rankone/error.hpp"
#include "rankone/grid.hpp"
#include "rankone/quotient.hpp"

namespace rankone::testing {

template <class F>
std::optional<ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Open unit box (0,1)^n sampled with `nodes` per axis, basepoint at the center.
inline GridDomain open_box(int nodes, int dim = 2) {
  std::vector<int> shape(dim, nodes);
  std::vector<double> lo(dim, 0.0), hi(dim, 1.0), center(dim, 0.5);
  return build_grid_domain(box_spec(
      shape, lo, hi,
      [](std::span<const double> p) {
        for (double v : p) {
          if (!(v > 0.0 && v < 1.0)) return false;
        }
        return true;
      },
      center));
}

// Closed box [0,1]^n: every node inside.
inline GridDomain closed_box(std::vector<int> shape, std::vector<double> base) {
  const std::size_t n = shape.size();
  return build_grid_domain(box_spec(shape, std::vector<double>(n, 0.0),
                                    std::vector<double>(n, 1.0), {}, base));
}

inline GridDomain unit_disk(int nodes) {
  const double c[2] = {0.5, 0.5};
  return build_grid_domain(box_spec(
      {nodes, nodes}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        return (p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5) < 0.25;
      },
      c));
}

// Quotient tree given directly by parents and edge lengths; phi(c) = depth.
inline QuotientTree hand_tree(const std::vector<ClassId>& parent,
                              const std::vector<double>& length) {
  QuotientTree zf;
  zf.codim = 1;
  zf.parent = parent;
  zf.parent_length = length;
  const auto n = static_cast<ClassId>(parent.size());
  zf.representative.resize(n);
  std::iota(zf.representative.begin(), zf.representative.end(), 0);
  zf.class_of = zf.representative;
  for (ClassId c = 0; c < n; ++c) {
    if (parent[c] < 0) zf.root = c;
  }
  zf.finalize();
  zf.phi = zf.depth;
  return zf;
}

// Path 0 - 1 - ... - (n-1) rooted at 0 with unit-free lengths.
inline QuotientTree path_tree(const std::vector<double>& lengths) {
  std::vector<ClassId> parent{-1};
  std::vector<double> length{0.0};
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    parent.push_back(static_cast<ClassId>(i));
    length.push_back(lengths[i]);
  }
  return hand_tree(parent, length);
}

}  // namespace rankone::testing
