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

#include "rankone/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "rankone/error.hpp"

namespace rankone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> row_major_strides(const std::vector<int>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a) {
    strides[a] = strides[a + 1] * static_cast<std::size_t>(shape[a + 1]);
  }
  return strides;
}

// Squared Euclidean distance transform along one line (lower envelope of
// parabolas). f holds squared distances, +inf where unknown.
void edt_line(std::vector<double>& f, double spacing, std::vector<int>& v,
              std::vector<double>& z, std::vector<double>& out) {
  const int n = static_cast<int>(f.size());
  const double s2 = spacing * spacing;
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + s2 * q * q;
    while (k >= 0) {
      const int p = v[k];
      const double fp = f[p] + s2 * p * p;
      const double x = (fq - fp) / (2.0 * s2 * (q - p));
      if (x <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : (fq - (f[v[k - 1]] + s2 * v[k - 1] * v[k - 1])) /
                                (2.0 * s2 * (q - v[k - 1]));
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
  } else {
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (j < k && z[j + 1] < q) ++j;
      const double d = (q - v[j]) * spacing;
      out[q] = d * d + f[v[j]];
    }
  }
  f.swap(out);
}

double horner(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

}  // namespace

GridDomain::GridDomain(std::vector<int> shape, std::vector<double> spacing,
                       std::vector<double> origin,
                       std::vector<std::uint8_t> inside,
                       std::size_t basepoint_flat)
    : shape_(std::move(shape)),
      spacing_(std::move(spacing)),
      origin_(std::move(origin)),
      inside_(std::move(inside)),
      basepoint_flat_(basepoint_flat) {
  const int n = dim();
  if (n < 1 || n > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument, "grid dimension must be 1..4");
  }
  if (static_cast<int>(spacing_.size()) != n ||
      static_cast<int>(origin_.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "spacing/origin size mismatch");
  }
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) {
    if (shape_[a] < 1) throw Error(ErrorCode::kInvalidArgument, "empty axis");
    if (!(spacing_[a] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");
    }
    total *= static_cast<std::size_t>(shape_[a]);
  }
  if (inside_.size() != total) {
    throw Error(ErrorCode::kInvalidArgument, "inside mask size mismatch");
  }
  if (basepoint_flat_ >= total || !inside_[basepoint_flat_]) {
    throw Error(ErrorCode::kBasepointOutside, "basepoint is not inside");
  }
  strides_ = row_major_strides(shape_);
  compact_.assign(total, -1);
  for (std::size_t i = 0; i < total; ++i) {
    if (inside_[i]) {
      compact_[i] = static_cast<NodeId>(nodes_.size());
      nodes_.push_back(i);
    }
  }
}

std::array<int, kMaxDim> GridDomain::multi_index(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
  return idx;
}

std::size_t GridDomain::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) flat += strides_[a] * idx[a];
  return flat;
}

std::int64_t GridDomain::shifted(std::size_t flat,
                                 std::span<const int> offset) const {
  const auto idx = multi_index(flat);
  std::int64_t out = 0;
  for (int a = 0; a < dim(); ++a) {
    const int j = idx[a] + offset[a];
    if (j < 0 || j >= shape_[a]) return -1;
    out += static_cast<std::int64_t>(strides_[a]) * j;
  }
  return out;
}

void GridDomain::point(std::size_t flat, std::span<double> out) const {
  const auto idx = multi_index(flat);
  for (int a = 0; a < dim(); ++a) out[a] = origin_[a] + idx[a] * spacing_[a];
}

std::vector<double> GridDomain::point(std::size_t flat) const {
  std::vector<double> p(dim());
  point(flat, p);
  return p;
}

double GridDomain::half_cell_diagonal() const {
  double s = 0.0;
  for (double h : spacing_) s += h * h;
  return 0.5 * std::sqrt(s);
}

void check_connected(const GridDomain& domain) {
  const int n = domain.dim();
  std::vector<std::uint8_t> seen(domain.node_count(), 0);
  std::deque<NodeId> queue{domain.basepoint()};
  seen[domain.basepoint()] = 1;
  std::size_t reached = 1;
  std::array<int, kMaxDim> off{};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const std::size_t fu = domain.flat_of(u);
    for (int a = 0; a < n; ++a) {
      for (int s : {-1, 1}) {
        off.fill(0);
        off[a] = s;
        const auto fv = domain.shifted(fu, std::span<const int>(off.data(), n));
        if (fv < 0) continue;
        const NodeId v = domain.node_of(static_cast<std::size_t>(fv));
        if (v < 0 || seen[v]) continue;
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  if (reached != domain.node_count()) {
    throw Error(ErrorCode::kDisconnectedDomain,
                "inside nodes are not axis-connected");
  }
}

GridDomain build_grid_domain(const GridSpec& spec) {
  const int n = static_cast<int>(spec.shape.size());
  if (n < 1 || n > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument, "grid dimension must be 1..4");
  }
  if (static_cast<int>(spec.basepoint.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "basepoint has wrong dimension");
  }
  std::size_t total = 1;
  for (int s : spec.shape) total *= static_cast<std::size_t>(std::max(s, 0));
  const auto strides = row_major_strides(spec.shape);

  std::vector<std::uint8_t> inside(total, 1);
  std::vector<double> p(n);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = 0; a < n; ++a) {
      const auto i = rem / strides[a];
      rem %= strides[a];
      p[a] = spec.origin[a] + static_cast<double>(i) * spec.spacing[a];
    }
    if (spec.inside) inside[flat] = spec.inside(p) ? 1 : 0;
  }
  std::size_t base = 0;
  for (int a = 0; a < n; ++a) {
    if (spec.basepoint[a] < 0 || spec.basepoint[a] >= spec.shape[a]) {
      throw Error(ErrorCode::kBasepointOutside, "basepoint outside the array");
    }
    base += strides[a] * spec.basepoint[a];
  }
  if (!inside[base]) {
    throw Error(ErrorCode::kBasepointOutside,
                "basepoint does not satisfy the inside predicate");
  }
  GridDomain domain(spec.shape, spec.spacing, spec.origin, std::move(inside),
                    base);

  check_connected(domain);
  return domain;
}

GridSpec box_spec(std::vector<int> shape, std::vector<double> lo,
                  std::vector<double> hi,
                  std::function<bool(std::span<const double>)> inside,
                  std::span<const double> base) {
  GridSpec spec;
  const std::size_t n = shape.size();
  spec.spacing.resize(n);
  spec.basepoint.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    spec.spacing[a] = shape[a] > 1 ? (hi[a] - lo[a]) / (shape[a] - 1) : 1.0;
    const long i = std::lround((base[a] - lo[a]) / spec.spacing[a]);
    spec.basepoint[a] = static_cast<int>(std::clamp<long>(i, 0, shape[a] - 1));
  }
  spec.shape = std::move(shape);
  spec.origin = std::move(lo);
  spec.inside = std::move(inside);
  return spec;
}

std::vector<double> boundary_distance(const GridDomain& domain) {
  const int n = domain.dim();
  // Padded array with a one-node outside frame on every side.
  std::vector<int> pshape(n);
  for (int a = 0; a < n; ++a) pshape[a] = domain.shape()[a] + 2;
  const auto pstrides = row_major_strides(pshape);
  std::size_t ptotal = 1;
  for (int s : pshape) ptotal *= static_cast<std::size_t>(s);

  std::vector<double> sq(ptotal, 0.0);
  for (std::size_t flat = 0; flat < domain.grid_size(); ++flat) {
    if (!domain.is_inside_flat(flat)) continue;
    const auto idx = domain.multi_index(flat);
    std::size_t pf = 0;
    for (int a = 0; a < n; ++a) pf += pstrides[a] * (idx[a] + 1);
    sq[pf] = kInf;
  }

  std::vector<double> line, out;
  std::vector<int> v;
  std::vector<double> z;
  for (int axis = 0; axis < n; ++axis) {
    const int len = pshape[axis];
    line.resize(len);
    out.resize(len);
    v.resize(len);
    z.resize(len + 1);
    const std::size_t step = pstrides[axis];
    for (std::size_t start = 0; start < ptotal; ++start) {
      // Visit each line once, from its first element.
      if ((start / step) % len != 0) continue;
      for (int i = 0; i < len; ++i) line[i] = sq[start + i * step];
      edt_line(line, domain.spacing()[axis], v, z, out);
      for (int i = 0; i < len; ++i) sq[start + i * step] = line[i];
    }
  }

  const double half_diag = domain.half_cell_diagonal();
  std::vector<double> dist(domain.node_count());
  for (NodeId node = 0; node < static_cast<NodeId>(domain.node_count());
       ++node) {
    const auto idx = domain.multi_index(domain.flat_of(node));
    std::size_t pf = 0;
    for (int a = 0; a < n; ++a) pf += pstrides[a] * (idx[a] + 1);
    dist[node] = std::sqrt(sq[pf]) - half_diag;
  }
  return dist;
}

NodeMask compute_omega_eps(const GridDomain& domain, double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  }
  const int n = domain.dim();
  const auto dist = boundary_distance(domain);
  const auto base = domain.point(domain.basepoint_flat());
  const double radius = 1.0 / eps;

  const auto count = static_cast<NodeId>(domain.node_count());
  NodeMask candidate(count, 0);
  std::vector<double> p(n);
  for (NodeId node = 0; node < count; ++node) {
    domain.point(domain.flat_of(node), p);
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += (p[a] - base[a]) * (p[a] - base[a]);
    candidate[node] = (dist[node] > eps && std::sqrt(r2) < radius) ? 1 : 0;
  }

  NodeMask mask(count, 0);
  const NodeId b = domain.basepoint();
  if (!candidate[b]) {
    throw Error(ErrorCode::kEmptyResult,
                "basepoint is excluded at this eps; the component is empty");
  }
  std::deque<NodeId> queue{b};
  mask[b] = 1;
  std::array<int, kMaxDim> off{};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (int a = 0; a < n; ++a) {
      for (int s : {-1, 1}) {
        off.fill(0);
        off[a] = s;
        const auto fv = domain.shifted(domain.flat_of(u),
                                       std::span<const int>(off.data(), n));
        if (fv < 0) continue;
        const NodeId v = domain.node_of(static_cast<std::size_t>(fv));
        if (v < 0 || mask[v] || !candidate[v]) continue;
        mask[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return mask;
}

SampledMap::SampledMap(GridDomain domain, int codim, std::vector<double> values)
    : domain_(std::move(domain)), codim_(codim), values_(std::move(values)) {
  if (codim_ < 1) throw Error(ErrorCode::kInvalidArgument, "codim must be >= 1");
  if (values_.size() != domain_.node_count() * static_cast<std::size_t>(codim_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "values must cover exactly the inside nodes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "map values must be finite");
    }
  }
}

bool SampledMap::interpolate(std::span<const double> x,
                             std::span<double> out) const {
  const int n = domain_.dim();
  std::array<int, kMaxDim> lo{};
  std::array<double, kMaxDim> t{};
  for (int a = 0; a < n; ++a) {
    const double u = (x[a] - domain_.origin()[a]) / domain_.spacing()[a];
    const int last = domain_.shape()[a] - 1;
    if (last == 0) {
      lo[a] = 0;
      t[a] = 0.0;
      continue;
    }
    lo[a] = std::clamp(static_cast<int>(std::floor(u)), 0, last - 1);
    t[a] = std::clamp(u - lo[a], 0.0, 1.0);
  }
  std::fill(out.begin(), out.end(), 0.0);
  std::array<int, kMaxDim> idx{};
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool up = (corner >> a) & 1;
      idx[a] = lo[a] + (up ? 1 : 0);
      w *= up ? t[a] : 1.0 - t[a];
    }
    if (w == 0.0) continue;
    for (int a = 0; a < n; ++a) {
      if (idx[a] >= domain_.shape()[a]) return false;
    }
    const NodeId node =
        domain_.node_of(domain_.flat_index(std::span<const int>(idx.data(), n)));
    if (node < 0) return false;
    const auto v = value(node);
    for (int j = 0; j < codim_; ++j) out[j] += w * v[j];
  }
  return true;
}

MapCase parse_map_case(std::string_view name) {
  if (name == "constant") return MapCase::kConstant;
  if (name == "monotone-line") return MapCase::kMonotoneLine;
  if (name == "saddle-reeb") return MapCase::kSaddleReeb;
  if (name == "scaled-saddle") return MapCase::kScaledSaddle;
  if (name == "full-rank-counterexample") {
    return MapCase::kFullRankCounterexample;
  }
  throw Error(ErrorCode::kUnknownCase, std::string(name));
}

std::string_view to_string(MapCase c) {
  switch (c) {
    case MapCase::kConstant: return "constant";
    case MapCase::kMonotoneLine: return "monotone-line";
    case MapCase::kSaddleReeb: return "saddle-reeb";
    case MapCase::kScaledSaddle: return "scaled-saddle";
    case MapCase::kFullRankCounterexample: return "full-rank-counterexample";
  }
  return "unknown";
}

MapFunction make_map_function(MapCase c, const GridDomain& domain,
                              const MapParams& params) {
  const int n = domain.dim();
  MapFunction f;
  f.dim = n;
  switch (c) {
    case MapCase::kConstant: {
      f.codim = static_cast<int>(params.constant.size());
      f.eval = [value = params.constant](std::span<const double>,
                                         std::span<double> out) {
        std::copy(value.begin(), value.end(), out.begin());
      };
      break;
    }
    case MapCase::kMonotoneLine: {
      f.codim = static_cast<int>(params.direction.size());
      f.eval = [v = params.direction, u = params.profile](
                   std::span<const double> x, std::span<double> out) {
        const double s = horner(u, x[0]);
        for (std::size_t j = 0; j < v.size(); ++j) out[j] = s * v[j];
      };
      break;
    }
    case MapCase::kSaddleReeb:
    case MapCase::kScaledSaddle: {
      if (n < 2) {
        throw Error(ErrorCode::kInvalidArgument, "saddle needs dim >= 2");
      }
      std::vector<double> center = params.center;
      if (center.empty()) {
        center.resize(n);
        for (int a = 0; a < n; ++a) {
          center[a] = domain.origin()[a] +
                      0.5 * (domain.shape()[a] - 1) * domain.spacing()[a];
        }
      }
      const double scale = c == MapCase::kScaledSaddle ? params.scale : 1.0;
      f.codim = static_cast<int>(params.phi.size());
      f.eval = [phi = params.phi, center, scale](std::span<const double> x,
                                                 std::span<double> out) {
        const double dx = x[0] - center[0];
        const double dy = x[1] - center[1];
        const double t = scale * (dx * dx - dy * dy);
        for (std::size_t j = 0; j < phi.size(); ++j) out[j] = horner(phi[j], t);
      };
      break;
    }
    case MapCase::kFullRankCounterexample: {
      f.codim = n;
      f.eval = [](std::span<const double> x, std::span<double> out) {
        std::copy(x.begin(), x.end(), out.begin());
      };
      break;
    }
  }
  if (f.codim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "map must have codim >= 1");
  }
  return f;
}

SampledMap sample_map(const GridDomain& domain, const MapFunction& f) {
  const std::size_t m = static_cast<std::size_t>(f.codim);
  std::vector<double> values(domain.node_count() * m);
  std::vector<double> p(domain.dim());
  for (NodeId node = 0; node < static_cast<NodeId>(domain.node_count());
       ++node) {
    domain.point(domain.flat_of(node), p);
    f.eval(p, std::span<double>(values.data() + node * m, m));
  }
  return SampledMap(domain, f.codim, std::move(values));
}

SampledMap generate_map(MapCase c, const GridDomain& domain,
                        const MapParams& params) {
  return sample_map(domain, make_map_function(c, domain, params));
}

std::vector<double> singular_values(std::span<const double> matrix, int rows,
                                    int cols) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      a(matrix.data(), rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

namespace {

struct RankAccumulator {
  int rank;
  double tol;
  std::size_t tested = 0;
  std::size_t violating = 0;
  double max_ratio = 0.0;

  void add(const std::vector<double>& sv) {
    static const double floor =
        std::sqrt(std::numeric_limits<double>::epsilon());
    ++tested;
    if (static_cast<int>(sv.size()) <= rank) return;
    const double ratio = sv[rank] / std::max(sv[0], floor);
    max_ratio = std::max(max_ratio, ratio);
    if (ratio > tol) ++violating;
  }

  RankReport finish(double step) const {
    RankReport r;
    r.tested_nodes = tested;
    r.max_sigma2_over_sigma1 = max_ratio;
    r.violating_fraction =
        tested == 0 ? 0.0 : static_cast<double>(violating) / tested;
    r.fd_step = step;
    return r;
  }
};

}  // namespace

RankReport fd_rank_report(const SampledMap& map, int rank, double step,
                          double tol) {
  const GridDomain& domain = map.domain();
  const int n = domain.dim();
  const int m = map.codim();
  std::vector<int> k(n);
  for (int a = 0; a < n; ++a) {
    k[a] = std::max(1, static_cast<int>(std::lround(step / domain.spacing()[a])));
  }
  RankAccumulator acc{rank, tol};
  std::vector<double> jac(static_cast<std::size_t>(m) * n);
  std::array<int, kMaxDim> off{};
  for (NodeId node = 0; node < static_cast<NodeId>(domain.node_count());
       ++node) {
    const std::size_t flat = domain.flat_of(node);
    bool interior = true;
    for (int a = 0; a < n && interior; ++a) {
      NodeId nb[2];
      for (int s = 0; s < 2; ++s) {
        off.fill(0);
        off[a] = s == 0 ? -k[a] : k[a];
        const auto f = domain.shifted(flat, std::span<const int>(off.data(), n));
        nb[s] = f < 0 ? -1 : domain.node_of(static_cast<std::size_t>(f));
        if (nb[s] < 0) interior = false;
      }
      if (!interior) break;
      const auto lo = map.value(nb[0]);
      const auto hi = map.value(nb[1]);
      const double denom = 2.0 * k[a] * domain.spacing()[a];
      for (int j = 0; j < m; ++j) jac[j * n + a] = (hi[j] - lo[j]) / denom;
    }
    if (!interior) continue;
    acc.add(singular_values(jac, m, n));
  }
  return acc.finish(step);
}

RankReport fd_rank_report(const VectorField& f, int dim, int codim,
                          const std::vector<std::vector<double>>& probes,
                          const FdProbeOptions& options) {
  RankAccumulator acc{options.rank, options.tol};
  const double noise_floor = std::numeric_limits<double>::epsilon() *
                             options.value_scale / options.step;
  std::size_t skipped = 0;
  std::vector<double> jac(static_cast<std::size_t>(codim) * dim);
  std::vector<double> x(dim), lo(codim), hi(codim);
  for (const auto& p : probes) {
    for (int a = 0; a < dim; ++a) {
      x.assign(p.begin(), p.end());
      x[a] = p[a] - options.step;
      f(x, lo);
      x[a] = p[a] + options.step;
      f(x, hi);
      for (int j = 0; j < codim; ++j) {
        jac[j * dim + a] = (hi[j] - lo[j]) / (2.0 * options.step);
      }
    }
    const auto sv = singular_values(jac, codim, dim);
    if (options.noise_multiplier > 0.0 &&
        sv[0] <= options.noise_multiplier * noise_floor) {
      ++skipped;
      continue;
    }
    acc.add(sv);
  }
  RankReport r = acc.finish(options.step);
  r.skipped_below_noise = skipped;
  r.noise_floor = noise_floor;
  return r;
}

}  // namespace rankone
