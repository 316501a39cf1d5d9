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

#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "doctest.h"
#include "rankone/error.hpp"
#include "rankone/grid.hpp"
#include "test_util.hpp"

using namespace rankone;
using rankone::testing::error_code;

namespace {

// Brute-force Omega_eps: distance to every outside node, padding ring
// included, then an axis flood fill from the basepoint.
NodeMask brute_omega(const GridDomain& d, double eps) {
  const int nx = d.shape()[0], ny = d.shape()[1];
  const double hx = d.spacing()[0], hy = d.spacing()[1];
  std::vector<std::pair<int, int>> outside;
  for (int i = -1; i <= nx; ++i) {
    for (int j = -1; j <= ny; ++j) {
      const bool in_array = i >= 0 && j >= 0 && i < nx && j < ny;
      if (!in_array || !d.is_inside_flat(static_cast<std::size_t>(i) * ny + j)) {
        outside.emplace_back(i, j);
      }
    }
  }
  const auto base = d.point(d.basepoint_flat());
  const double half = 0.5 * std::hypot(hx, hy);
  NodeMask cand(d.node_count(), 0);
  for (NodeId v = 0; v < static_cast<NodeId>(d.node_count()); ++v) {
    const auto flat = d.flat_of(v);
    const int i = static_cast<int>(flat / ny), j = static_cast<int>(flat % ny);
    double best = INFINITY;
    for (auto [a, b] : outside) {
      best = std::min(best, std::hypot((a - i) * hx, (b - j) * hy));
    }
    const auto p = d.point(flat);
    const double r = std::hypot(p[0] - base[0], p[1] - base[1]);
    cand[v] = (best - half > eps && r < 1.0 / eps) ? 1 : 0;
  }
  NodeMask mask(d.node_count(), 0);
  if (!cand[d.basepoint()]) return mask;
  std::deque<NodeId> q{d.basepoint()};
  mask[d.basepoint()] = 1;
  while (!q.empty()) {
    const auto flat = d.flat_of(q.front());
    q.pop_front();
    const int i = static_cast<int>(flat / ny), j = static_cast<int>(flat % ny);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      const NodeId w = d.node_of(static_cast<std::size_t>(a) * ny + b);
      if (w < 0 || mask[w] || !cand[w]) continue;
      mask[w] = 1;
      q.push_back(w);
    }
  }
  return mask;
}

GridDomain l_shape(int nodes) {
  const double base[2] = {0.1, 0.1};
  return build_grid_domain(box_spec(
      {nodes, nodes}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        const bool bottom = p[1] > 0.0 && p[1] < 0.2 && p[0] > 0.0 && p[0] < 1.0;
        const bool side = p[0] > 0.0 && p[0] < 0.2 && p[1] > 0.0 && p[1] < 1.0;
        return bottom || side;
      },
      base));
}

}  // namespace

TEST_CASE("open unit square has (n-2)^2 inside nodes") {
  const auto d = rankone::testing::open_box(65);
  CHECK(d.node_count() == 63u * 63u);
  CHECK(d.dim() == 2);
  const auto b = d.node_point(d.basepoint());
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(0.5));
}

TEST_CASE("disk inside count matches the predicate") {
  const int n = 65;
  const auto d = rankone::testing::unit_disk(n);
  std::size_t expected = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = i / 64.0 - 0.5, y = j / 64.0 - 0.5;
      if (x * x + y * y < 0.25) ++expected;
    }
  }
  CHECK(d.node_count() == expected);
}

TEST_CASE("domain construction errors") {
  const double base[2] = {0.25, 0.5};
  const auto two_squares = box_spec(
      {33, 33}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        const bool y = p[1] > 0.1 && p[1] < 0.9;
        return y && ((p[0] > 0.1 && p[0] < 0.4) || (p[0] > 0.6 && p[0] < 0.9));
      },
      base);
  CHECK(error_code([&] { build_grid_domain(two_squares); }) ==
        ErrorCode::kDisconnectedDomain);

  const double corner[2] = {0.0, 0.0};
  const auto disk = box_spec(
      {33, 33}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        return (p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5) < 0.25;
      },
      corner);
  CHECK(error_code([&] { build_grid_domain(disk); }) ==
        ErrorCode::kBasepointOutside);
}

TEST_CASE("boundary distance next to the edge") {
  const auto d = rankone::testing::open_box(33);
  const auto dist = boundary_distance(d);
  const double h = 1.0 / 32.0;
  const int idx[2] = {1, 16};
  const NodeId v = d.node_of(d.flat_index(idx));
  CHECK(dist[v] == doctest::Approx(h - 0.5 * std::sqrt(2.0) * h));
}

TEST_CASE("omega_eps matches brute force") {
  SUBCASE("square") {
    const auto d = rankone::testing::open_box(33);
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
      CHECK(compute_omega_eps(d, eps) == brute_omega(d, eps));
    }
  }
  SUBCASE("disk") {
    const auto d = rankone::testing::unit_disk(33);
    for (double eps : {0.05, 0.1, 0.2}) {
      CHECK(compute_omega_eps(d, eps) == brute_omega(d, eps));
    }
  }
  SUBCASE("L-shaped corridor") {
    const auto d = l_shape(41);
    for (double eps : {0.02, 0.05, 0.07}) {
      const auto mask = compute_omega_eps(d, eps);
      CHECK(mask == brute_omega(d, eps));
    }
  }
}

TEST_CASE("omega_eps is nested and empties out") {
  const auto d = rankone::testing::open_box(33);
  const auto wide = compute_omega_eps(d, 0.05);
  const auto narrow = compute_omega_eps(d, 0.1);
  for (std::size_t i = 0; i < wide.size(); ++i) {
    if (narrow[i]) CHECK(wide[i]);
  }
  CHECK(error_code([&] { compute_omega_eps(d, 0.6); }) ==
        ErrorCode::kEmptyResult);
  CHECK(error_code([&] { compute_omega_eps(d, 0.0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("omega_eps respects the 1/eps ball") {
  const double base[2] = {10.0, 10.0};
  const auto d = build_grid_domain(
      box_spec({81, 81}, {0.0, 0.0}, {20.0, 20.0}, {}, base));
  const auto mask = compute_omega_eps(d, 0.2);
  std::size_t count = 0, expected = 0;
  for (NodeId v = 0; v < static_cast<NodeId>(d.node_count()); ++v) {
    const auto p = d.node_point(v);
    const double r = std::hypot(p[0] - 10.0, p[1] - 10.0);
    if (mask[v]) {
      ++count;
      CHECK(r < 5.0);
    }
    if (r < 5.0) ++expected;
  }
  CHECK(count == expected);
}

TEST_CASE("map case names") {
  for (auto c : {MapCase::kConstant, MapCase::kMonotoneLine,
                 MapCase::kSaddleReeb, MapCase::kScaledSaddle,
                 MapCase::kFullRankCounterexample}) {
    CHECK(parse_map_case(to_string(c)) == c);
  }
  CHECK(error_code([] { parse_map_case("torus"); }) == ErrorCode::kUnknownCase);
}

TEST_CASE("generated maps") {
  const auto d = rankone::testing::open_box(65);
  const auto c = generate_map(MapCase::kConstant, d);
  CHECK(c.codim() == 2);
  for (NodeId v = 0; v < static_cast<NodeId>(d.node_count()); ++v) {
    CHECK(c.value(v)[0] == 1.0);
    CHECK(c.value(v)[1] == 2.0);
  }

  const auto s = generate_map(MapCase::kSaddleReeb, d);
  CHECK(s.value(d.basepoint())[0] == 0.0);
  CHECK(s.value(d.basepoint())[1] == 0.0);
  const int idx[2] = {48, 16};
  const NodeId v = d.node_of(d.flat_index(idx));
  // (x, y) = (0.75, 0.25): t = 0.0625 - 0.0625 = 0
  CHECK(s.value(v)[0] == doctest::Approx(0.0));
  const int idx2[2] = {48, 32};
  const NodeId w = d.node_of(d.flat_index(idx2));
  CHECK(s.value(w)[0] == doctest::Approx(0.0625));
  CHECK(s.value(w)[1] == doctest::Approx(0.0625 * 0.0625 / 2));

  const auto q = generate_map(MapCase::kScaledSaddle, d);
  CHECK(q.value(w)[0] == doctest::Approx(0.25));

  const auto id = generate_map(MapCase::kFullRankCounterexample, d);
  CHECK(id.value(w)[0] == doctest::Approx(0.75));
  CHECK(id.value(w)[1] == doctest::Approx(0.5));

  const auto line = generate_map(MapCase::kMonotoneLine, d);
  CHECK(line.codim() == 1);
  CHECK(line.value(w)[0] == doctest::Approx(0.75));
}

TEST_CASE("finite-difference rank report") {
  const auto d = rankone::testing::open_box(65);
  const double h = 1.0 / 64.0;
  const auto c = fd_rank_report(generate_map(MapCase::kConstant, d), 1, h);
  CHECK(c.tested_nodes > 0);
  CHECK(c.violating_fraction == 0.0);

  const auto s = fd_rank_report(generate_map(MapCase::kSaddleReeb, d), 1, h);
  CHECK(s.violating_fraction <= 0.01);

  const auto id =
      fd_rank_report(generate_map(MapCase::kFullRankCounterexample, d), 1, h);
  CHECK(id.violating_fraction >= 0.99);
  CHECK(id.max_sigma2_over_sigma1 == doctest::Approx(1.0));
}

TEST_CASE("singular values") {
  const double diag[4] = {0.0, 3.0, 1.0, 0.0};
  auto sv = singular_values(diag, 2, 2);
  CHECK(sv[0] == doctest::Approx(3.0));
  CHECK(sv[1] == doctest::Approx(1.0));
  const double outer[6] = {1, 2, 3, 2, 4, 6};
  sv = singular_values(outer, 2, 3);
  CHECK(sv[0] == doctest::Approx(std::sqrt(14.0 * 5.0)));
  CHECK(sv[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multilinear interpolation reproduces affine maps") {
  const auto d = rankone::testing::open_box(17);
  MapFunction f{2, 1, [](std::span<const double> x, std::span<double> out) {
                  out[0] = 0.3 + 2.0 * x[0] - 1.5 * x[1];
                }};
  const auto m = sample_map(d, f);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.07, 0.93);
  for (int k = 0; k < 200; ++k) {
    const double x[2] = {u(rng), u(rng)};
    double out[1];
    REQUIRE(m.interpolate(x, out));
    CHECK(out[0] == doctest::Approx(0.3 + 2.0 * x[0] - 1.5 * x[1]).epsilon(1e-12));
  }
  const double edge[2] = {0.01, 0.5};
  double out[1];
  CHECK_FALSE(m.interpolate(edge, out));
}
