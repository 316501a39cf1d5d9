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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankone {

inline constexpr int kMaxDim = 4;

// Compact id of an inside node. Inside nodes are numbered in increasing
// order of their row-major flat index (last axis fastest).
using NodeId = std::int32_t;

// Per-node boolean over inside nodes, indexed by NodeId.
using NodeMask = std::vector<std::uint8_t>;

using VectorField =
    std::function<void(std::span<const double> x, std::span<double> out)>;

struct GridSpec {
  std::vector<int> shape;
  std::vector<double> spacing;
  std::vector<double> origin;
  // Empty predicate means every node is inside.
  std::function<bool(std::span<const double>)> inside;
  std::vector<int> basepoint;
};

class GridDomain {
 public:
  GridDomain() = default;
  GridDomain(std::vector<int> shape, std::vector<double> spacing,
             std::vector<double> origin, std::vector<std::uint8_t> inside,
             std::size_t basepoint_flat);

  int dim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  std::size_t grid_size() const { return inside_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  bool is_inside_flat(std::size_t flat) const { return inside_[flat] != 0; }
  // -1 for outside nodes.
  NodeId node_of(std::size_t flat) const { return compact_[flat]; }
  std::size_t flat_of(NodeId node) const { return nodes_[node]; }
  const std::vector<std::uint8_t>& inside_mask() const { return inside_; }

  NodeId basepoint() const { return compact_[basepoint_flat_]; }
  std::size_t basepoint_flat() const { return basepoint_flat_; }

  std::array<int, kMaxDim> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> idx) const;
  // Flat index of idx + offset, or -1 when it leaves the array.
  std::int64_t shifted(std::size_t flat, std::span<const int> offset) const;

  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;
  std::vector<double> node_point(NodeId node) const {
    return point(nodes_[node]);
  }

  // Half the diagonal of one grid cell.
  double half_cell_diagonal() const;

 private:
  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint8_t> inside_;
  std::vector<NodeId> compact_;
  std::vector<std::size_t> nodes_;
  std::size_t basepoint_flat_ = 0;
};

// Throws DisconnectedDomain unless the inside nodes are axis-connected.
void check_connected(const GridDomain& domain);

// Materializes the inside mask from the predicate and checks that the inside
// set is axis-connected and contains the basepoint.
GridDomain build_grid_domain(const GridSpec& spec);

// Uniform box grid on [lo, hi] per axis with the basepoint at the node
// nearest to `base`.
GridSpec box_spec(std::vector<int> shape, std::vector<double> lo,
                  std::vector<double> hi,
                  std::function<bool(std::span<const double>)> inside,
                  std::span<const double> base);

// Connected component containing the basepoint of
// {x inside : |x - x_o| < 1/eps and dist(x, boundary) > eps}.
NodeMask compute_omega_eps(const GridDomain& domain, double eps);

// Euclidean distance from every node to the nearest outside node (nodes past
// the array edge count as outside), minus half a cell diagonal.
std::vector<double> boundary_distance(const GridDomain& domain);

class SampledMap {
 public:
  SampledMap() = default;
  SampledMap(GridDomain domain, int codim, std::vector<double> values);

  const GridDomain& domain() const { return domain_; }
  int codim() const { return codim_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> value(NodeId node) const {
    return {values_.data() + static_cast<std::size_t>(node) * codim_,
            static_cast<std::size_t>(codim_)};
  }

  // Multilinear interpolation within the cell containing x. Returns false when
  // a corner of that cell is outside the domain.
  bool interpolate(std::span<const double> x, std::span<double> out) const;

 private:
  GridDomain domain_;
  int codim_ = 0;
  std::vector<double> values_;
};

enum class MapCase {
  kConstant,
  kMonotoneLine,
  kSaddleReeb,
  kScaledSaddle,
  kFullRankCounterexample,
};

MapCase parse_map_case(std::string_view name);
std::string_view to_string(MapCase c);

struct MapParams {
  // constant: the value c.
  std::vector<double> constant{1.0, 2.0};
  // monotone-line: f(x) = u(x_1) v with u a polynomial in x_1.
  std::vector<double> direction{1.0};
  std::vector<double> profile{0.0, 1.0};
  // saddle cases: f = Phi(scale * h), h = (x - c_x)^2 - (y - c_y)^2; each
  // output component of Phi is a polynomial given by its coefficients.
  std::vector<std::vector<double>> phi{{0.0, 1.0}, {0.0, 0.0, 0.5}};
  double scale = 4.0;
  // Saddle center; empty means the center of the grid box.
  std::vector<double> center;
};

struct MapFunction {
  int dim = 0;
  int codim = 0;
  VectorField eval;
};

MapFunction make_map_function(MapCase c, const GridDomain& domain,
                              const MapParams& params = {});

SampledMap generate_map(MapCase c, const GridDomain& domain,
                        const MapParams& params = {});
SampledMap sample_map(const GridDomain& domain, const MapFunction& f);

struct RankReport {
  std::size_t tested_nodes = 0;
  // max over tested points of sigma_{r+1} / max(sigma_1, floor)
  double max_sigma2_over_sigma1 = 0.0;
  double violating_fraction = 0.0;
  double fd_step = 0.0;
  // Points skipped because sigma_1 did not clear the noise threshold.
  std::size_t skipped_below_noise = 0;
  double noise_floor = 0.0;
};

inline constexpr double kDefaultRankTolerance = 1e-3;

// Central-difference Jacobians at inside nodes whose +-k e_i neighbors are all
// inside, k = max(1, round(step / h_i)).
RankReport fd_rank_report(const SampledMap& map, int rank, double step,
                          double tol = kDefaultRankTolerance);

struct FdProbeOptions {
  int rank = 1;
  double step = 1e-6;
  double tol = kDefaultRankTolerance;
  // Points where sigma_1 <= noise_multiplier * noise_floor are skipped;
  // noise_floor = eps_machine * value_scale / step.
  double noise_multiplier = 0.0;
  double value_scale = 1.0;
};

RankReport fd_rank_report(const VectorField& f, int dim, int codim,
                          const std::vector<std::vector<double>>& probes,
                          const FdProbeOptions& options);

// Singular values, descending, of a row-major rows x cols matrix.
std::vector<double> singular_values(std::span<const double> matrix, int rows,
                                    int cols);

}  // namespace rankone
