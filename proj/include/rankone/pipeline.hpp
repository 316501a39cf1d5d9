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
#include <memory>
#include <string>
#include <vector>

#include "rankone/approximant.hpp"
#include "rankone/finite_tree.hpp"
#include "rankone/grid.hpp"
#include "rankone/map_io.hpp"
#include "rankone/quotient.hpp"
#include "rankone/smoothing.hpp"

namespace rankone {

inline constexpr int kReportVersion = 1;

struct ApproxConfig {
  double epsilon = 0.1;
  // Negative means 1e-9 times the largest edge image weight.
  double tau = -1.0;
  int subdivision = 1;
  bool diagonals = true;
  // Step of the finite-difference rank check on f_eps.
  double fd_step = 1e-6;
  double rank_tol = kDefaultRankTolerance;
  std::uint64_t seed = 1;
  Smoothness smoothness = Smoothness::kInfinite;
  // Fail with HypothesisViolated instead of warning.
  bool strict_rank = false;
  // Largest violating fraction of the input rank check that still passes.
  double hypothesis_fraction = 0.01;
  // Negative means 0.1 times the largest edge image weight.
  double tree_tol = -1.0;
  std::size_t tree_samples = 20000;
  std::size_t rank_probes = 1000;
  std::size_t projection_probes = 10000;
  std::size_t pair_samples = 10000;
  // Probes with sigma_1 below this multiple of the noise floor are skipped.
  double noise_multiplier = 10.0;
  // Allowed sup error is 2 eps + slack_cells * h.
  double slack_cells = 5.0;
  bool timings = false;
};

Json config_to_json(const ApproxConfig& config);

// min(eps / (1 + sqrt(E) + 2E), lambda / 4).
double compute_delta(double epsilon, int E, double lambda_min);

struct VerifyReport {
  std::size_t region_nodes = 0;
  double sup_error = 0.0;
  double bound = 0.0;
  bool within_bound = false;
  RankReport rank;
  bool rank_pass = false;
  // max distance from rho_eps(g_eps(x)) to w(T) at the rank probes.
  double max_image_distance = 0.0;
};

struct ApproxResult {
  std::shared_ptr<const Approximant> f_eps;
  Json report;
  bool within_tolerance = false;
};

// Runs the whole construction. Throws HypothesisViolated (strict mode),
// NotATree, or any stage error.
ApproxResult approximate(const SampledMap& map, const ApproxConfig& config);

// Random points in cells of `region` whose corners are all in the region.
std::vector<std::vector<double>> interior_probes(const GridDomain& domain,
                                                 const NodeMask& region,
                                                 std::size_t count,
                                                 std::uint64_t seed);

VerifyReport verify(const SampledMap& map, const Approximant& f_eps,
                    const NodeMask& region, const ApproxConfig& config);

Json verify_to_json(const VerifyReport& v);
Json rank_report_to_json(const RankReport& r);

}  // namespace rankone
