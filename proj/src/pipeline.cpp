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

#include "rankone/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rankone/embedding.hpp"
#include "rankone/error.hpp"
#include "rankone/quasimetric.hpp"
#include "rankone/random.hpp"

namespace rankone {
namespace {

using Clock = std::chrono::steady_clock;

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// phi at a point of T, linear between consecutive classes of the edge.
std::vector<double> phi_at(const QuotientTree& zf, const FiniteTree& tree,
                           TreePoint p) {
  const auto& e = tree.edges[p.edge];
  const auto& off = e.offsets;
  const auto it = std::upper_bound(off.begin(), off.end(), p.offset);
  std::size_t i = it == off.begin() ? 0 : static_cast<std::size_t>(it - off.begin()) - 1;
  i = std::min(i, off.size() - 2);
  const double len = off[i + 1] - off[i];
  const double t = len > 0.0 ? std::clamp((p.offset - off[i]) / len, 0.0, 1.0)
                             : 0.0;
  const auto a = zf.phi_of(e.class_path[i]);
  const auto b = zf.phi_of(e.class_path[i + 1]);
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = (1.0 - t) * a[j] + t * b[j];
  return out;
}

Json tree_check_to_json(const TreeCheckReport& r, double tol) {
  return {{"quadruples_tested", r.quadruples_tested},
          {"max_four_point_defect", r.max_four_point_defect},
          {"tree_metric_defect", r.tree_metric_defect},
          {"phi_lipschitz_defect", r.phi_lipschitz_defect},
          {"tolerance", tol},
          {"pass", r.pass}};
}

class StageTimer {
 public:
  explicit StageTimer(bool enabled) : enabled_(enabled), last_(Clock::now()) {}
  void mark(const char* stage) {
    const auto now = Clock::now();
    if (enabled_) {
      timings_[stage] =
          std::chrono::duration<double>(now - last_).count();
    }
    last_ = now;
  }
  const Json& json() const { return timings_; }

 private:
  bool enabled_;
  Clock::time_point last_;
  Json timings_ = Json::object();
};

}  // namespace

Json config_to_json(const ApproxConfig& c) {
  return {{"epsilon", c.epsilon},
          {"tau", c.tau},
          {"subdivision", c.subdivision},
          {"diagonals", c.diagonals},
          {"fd_step", c.fd_step},
          {"rank_tol", c.rank_tol},
          {"seed", c.seed},
          {"smoothness", to_string(c.smoothness)},
          {"strict_rank", c.strict_rank},
          {"hypothesis_fraction", c.hypothesis_fraction},
          {"tree_tol", c.tree_tol},
          {"tree_samples", c.tree_samples},
          {"rank_probes", c.rank_probes},
          {"projection_probes", c.projection_probes},
          {"pair_samples", c.pair_samples},
          {"noise_multiplier", c.noise_multiplier},
          {"slack_cells", c.slack_cells}};
}

Json rank_report_to_json(const RankReport& r) {
  return {{"tested_nodes", r.tested_nodes},
          {"max_sigma2_over_sigma1", r.max_sigma2_over_sigma1},
          {"violating_fraction", r.violating_fraction},
          {"fd_step", r.fd_step},
          {"skipped_below_noise", r.skipped_below_noise},
          {"noise_floor", r.noise_floor}};
}

Json verify_to_json(const VerifyReport& v) {
  return {{"region_nodes", v.region_nodes},
          {"sup_error_on_omega_eps", v.sup_error},
          {"allowed_error", v.bound},
          {"within_bound", v.within_bound},
          {"rank", rank_report_to_json(v.rank)},
          {"rank_pass", v.rank_pass},
          {"max_image_distance", v.max_image_distance}};
}

double compute_delta(double epsilon, int E, double lambda_min) {
  if (E < 1) throw Error(ErrorCode::kInvalidArgument, "E must be >= 1");
  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  }
  const double e = static_cast<double>(E);
  return std::min(epsilon / (1.0 + std::sqrt(e) + 2.0 * e), lambda_min / 4.0);
}

std::vector<std::vector<double>> interior_probes(const GridDomain& domain,
                                                 const NodeMask& region,
                                                 std::size_t count,
                                                 std::uint64_t seed) {
  const int n = domain.dim();
  std::vector<NodeId> cells;
  std::array<int, kMaxDim> off{};
  for (NodeId v = 0; v < static_cast<NodeId>(domain.node_count()); ++v) {
    if (!region[v]) continue;
    bool ok = true;
    for (int c = 1; c < (1 << n) && ok; ++c) {
      for (int a = 0; a < n; ++a) off[a] = (c >> a) & 1;
      const auto f = domain.shifted(domain.flat_of(v),
                                    std::span<const int>(off.data(), n));
      const NodeId u = f < 0 ? -1 : domain.node_of(static_cast<std::size_t>(f));
      ok = u >= 0 && region[u];
    }
    if (ok) cells.push_back(v);
  }
  std::vector<std::vector<double>> probes;
  if (cells.empty()) return probes;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const NodeId v = cells[uniform_index(rng, cells.size())];
    auto x = domain.node_point(v);
    for (int a = 0; a < n; ++a) {
      x[a] += uniform_real(rng, 0.0, 1.0) * domain.spacing()[a];
    }
    probes.push_back(std::move(x));
  }
  return probes;
}

VerifyReport verify(const SampledMap& map, const Approximant& f_eps,
                    const NodeMask& region, const ApproxConfig& config) {
  const GridDomain& d = map.domain();
  VerifyReport v;
  std::vector<double> x(d.dim()), y(map.codim());
  double scale = 0.0;
  for (double value : map.values()) scale = std::max(scale, std::abs(value));
  for (NodeId node = 0; node < static_cast<NodeId>(d.node_count()); ++node) {
    if (!region[node]) continue;
    ++v.region_nodes;
    d.point(d.flat_of(node), x);
    f_eps.eval(x, y);
    v.sup_error = std::max(v.sup_error, norm_diff(y, map.value(node)));
  }
  const double h = *std::max_element(d.spacing().begin(), d.spacing().end());
  v.bound = 2.0 * config.epsilon + config.slack_cells * h;
  v.within_bound = v.sup_error <= v.bound;

  const auto probes =
      interior_probes(d, region, config.rank_probes, config.seed);
  FdProbeOptions options;
  options.rank = 1;
  options.step = config.fd_step;
  options.tol = config.rank_tol;
  options.noise_multiplier = config.noise_multiplier;
  options.value_scale = std::max(scale, 1e-300);
  const VectorField field = [&](std::span<const double> p,
                                std::span<double> out) { f_eps.eval(p, out); };
  v.rank = fd_rank_report(field, d.dim(), map.codim(), probes, options);
  v.rank_pass = v.rank.max_sigma2_over_sigma1 <= config.rank_tol;

  if (!f_eps.is_constant()) {
    const Embedding& emb = f_eps.g()->embedding();
    for (const auto& p : probes) {
      v.max_image_distance = std::max(
          v.max_image_distance, distance_to_image(emb, f_eps.tree_coordinates(p)));
    }
  }
  return v;
}

ApproxResult approximate(const SampledMap& map, const ApproxConfig& config) {
  if (!(config.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  const GridDomain& domain = map.domain();
  StageTimer timer(config.timings);
  Json report;
  report["schema"] = "rankone.report";
  report["version"] = kReportVersion;
  report["config"] = config_to_json(config);
  report["input"] = {{"dim", domain.dim()},
                     {"shape", domain.shape()},
                     {"codim", map.codim()},
                     {"inside_nodes", domain.node_count()}};

  // Rank hypothesis on the samples.
  const double hmax =
      *std::max_element(domain.spacing().begin(), domain.spacing().end());
  const RankReport hypothesis = fd_rank_report(map, 1, hmax, config.rank_tol);
  const bool hypothesis_ok =
      hypothesis.violating_fraction <= config.hypothesis_fraction;
  report["hypothesis"] = rank_report_to_json(hypothesis);
  report["hypothesis"]["pass"] = hypothesis_ok;
  if (!hypothesis_ok && config.strict_rank) {
    throw Error(ErrorCode::kHypothesisViolated,
                "rank check failed on " +
                    std::to_string(hypothesis.violating_fraction * 100.0) +
                    "% of nodes");
  }
  timer.mark("hypothesis");

  const auto graph =
      build_weight_graph(map, config.subdivision, config.diagonals);
  const double tau =
      config.tau >= 0.0 ? config.tau : default_zero_threshold(graph);
  const auto zf = build_quotient(graph, map, tau);
  const double tree_tol = config.tree_tol >= 0.0
                              ? config.tree_tol
                              : 0.1 * graph.max_image_weight();
  const auto check =
      check_tree(zf, config.tree_samples, tree_tol, config.seed);
  report["quotient"] = {{"classes", zf.class_count()},
                        {"zero_threshold", tau},
                        {"max_edge_image_weight", graph.max_image_weight()},
                        {"tree_check", tree_check_to_json(check, tree_tol)}};
  timer.mark("quotient");
  if (!check.pass) {
    throw Error(ErrorCode::kNotATree,
                "four-point defect " +
                    std::to_string(check.max_four_point_defect) +
                    " exceeds " + std::to_string(tree_tol));
  }

  const NodeMask mask = compute_omega_eps(domain, config.epsilon);
  std::vector<ClassId> region;
  {
    std::vector<std::uint8_t> seen(zf.class_count(), 0);
    for (NodeId v = 0; v < static_cast<NodeId>(mask.size()); ++v) {
      const ClassId c = zf.class_of[v];
      if (mask[v] && !seen[c]) {
        seen[c] = 1;
        region.push_back(c);
      }
    }
    std::sort(region.begin(), region.end());
  }
  std::size_t region_nodes = 0;
  for (auto b : mask) region_nodes += b;
  report["omega_eps"] = {{"nodes", region_nodes}, {"classes", region.size()}};

  const auto net = build_eps_net(zf, region, config.epsilon);
  const FiniteTree tree = order_edges(build_subtree(zf, net));
  const Retraction r = retract(zf, tree);
  const int E = static_cast<int>(tree.edge_count());
  report["tree"] = {{"net_size", net.size()},
                    {"vertices", tree.vertices.size()},
                    {"E", E},
                    {"lambda_min", E > 0 ? tree.lambda_min : 0.0},
                    {"degenerate", tree.degenerate},
                    {"merged_short_edges", tree.merged_short_edges}};

  // Retraction invariants on sampled class pairs.
  {
    Rng rng(config.seed + 1);
    double max_disp = 0.0, lip = 0.0, dist_defect = 0.0;
    for (ClassId c : region) max_disp = std::max(max_disp, r.displacement[c]);
    const auto count = zf.class_count();
    for (std::size_t i = 0; i < config.pair_samples; ++i) {
      const auto a = static_cast<ClassId>(uniform_index(rng, count));
      const auto b = static_cast<ClassId>(uniform_index(rng, count));
      lip = std::max(lip, quotient_distance(zf, r.nearest[a], r.nearest[b]) -
                              quotient_distance(zf, a, b));
      dist_defect = std::max(
          dist_defect,
          std::abs(quotient_distance(zf, a, r.nearest[a]) - r.displacement[a]));
    }
    report["retraction"] = {{"max_displacement", max_disp},
                            {"below_epsilon", max_disp < config.epsilon},
                            {"lipschitz_defect", lip},
                            {"distance_defect", dist_defect}};
  }
  timer.mark("tree");

  ApproxResult result;
  if (E == 0) {
    const auto value = zf.phi_of(net.front());
    result.f_eps = std::make_shared<Approximant>(
        domain.dim(), std::vector<double>(value.begin(), value.end()));
    report["E"] = 0;
    report["lambda_min"] = nullptr;
    report["delta"] = nullptr;
    report["budget"] = {{"holds", true}};
  } else {
    const Embedding emb = embed_tree(tree);
    {
      Rng rng(config.seed + 2);
      std::vector<std::pair<TreePoint, TreePoint>> pairs;
      for (std::size_t i = 0; i < config.pair_samples; ++i) {
        const TreePoint p = random_tree_point(tree, rng);
        pairs.emplace_back(p, random_tree_point(tree, rng));
      }
      const auto ec = tree_l1_check(zf, tree, emb, pairs);
      report["embedding"] = {{"pairs", ec.pairs},
                             {"l1_defect", ec.l1_defect},
                             {"lipschitz_defect", ec.lipschitz_defect},
                             {"inverse_lipschitz", ec.inverse_lipschitz},
                             {"sqrt_E", std::sqrt(static_cast<double>(E))}};
    }

    const double delta = compute_delta(config.epsilon, E, tree.lambda_min);
    const double factor = 1.0 + std::sqrt(static_cast<double>(E)) + 2.0 * E;
    const double lhs = factor * delta + config.epsilon;
    const double rhs = 2.0 * config.epsilon;
    const bool budget = lhs <= rhs * (1.0 + 4.0 * 0x1.0p-53);
    if (!budget) {
      throw Error(ErrorCode::kInvalidArgument, "error budget audit failed");
    }
    report["E"] = E;
    report["lambda_min"] = tree.lambda_min;
    report["delta"] = delta;
    report["budget"] = {{"lhs", lhs}, {"rhs", rhs}, {"holds", budget}};

    auto rho = std::make_shared<Projection>(
        rho_eps(emb, delta, config.smoothness));
    {
      Rng rng(config.seed + 3);
      double member = 0.0, move = 0.0;
      std::size_t multi = 0;
      for (std::size_t i = 0; i < config.projection_probes; ++i) {
        const auto t = sample_neighborhood(tree, emb, delta, rng);
        const auto y = (*rho)(t);
        member = std::max(member, distance_to_image(emb, y));
        move = std::max(move, norm_diff(y, t));
        const auto diag = rho->diagonal(t);
        const auto active = std::count_if(diag.begin(), diag.end(),
                                          [](double v) { return v > 1e-9; });
        if (active > 1) ++multi;
      }
      report["projection"] = {
          {"probes", config.projection_probes},
          {"max_distance_to_image", member},
          {"max_displacement", move},
          {"displacement_bound", 2.0 * std::sqrt(static_cast<double>(E)) * delta},
          {"probes_with_rank_above_one", multi}};
    }
    timer.mark("embedding");

    // g = w o r o psi on the grid, then g_eps.
    TreeSamples samples;
    std::vector<double> gvalues;
    gvalues.reserve(domain.node_count() * E);
    for (NodeId v = 0; v < static_cast<NodeId>(domain.node_count()); ++v) {
      const TreePoint p = r.to_tree[zf.class_of[v]];
      samples.points.push_back(p);
      const auto w = embed_point(emb, p);
      gvalues.insert(gvalues.end(), w.begin(), w.end());
    }
    samples.embedded = SampledMap(domain, E, std::move(gvalues));
    const auto g = mollify_tree_map(zf, tree, emb, std::move(samples), delta);
    report["g_eps"] = {{"sigma", g.map->sigma()},
                       {"lipschitz_estimate", g.lipschitz_estimate},
                       {"sup_error", g.achieved_sup_error},
                       {"target", delta},
                       {"retries", g.retries}};
    timer.mark("g_eps");

    // phi o w^-1 sampled on w(T).
    LipschitzSamples ls;
    ls.dim = E;
    ls.codim = map.codim();
    auto add = [&](TreePoint p) {
      const auto x = embed_point(emb, p);
      const auto v = phi_at(zf, tree, p);
      ls.points.insert(ls.points.end(), x.begin(), x.end());
      ls.values.insert(ls.values.end(), v.begin(), v.end());
    };
    for (ClassId c : tree.vertices) add(tree.class_point[c]);
    for (int k = 0; k < E; ++k) {
      const double lam = tree.edges[k].lambda;
      const int pieces =
          std::max(1, static_cast<int>(std::ceil(lam / (0.5 * delta))));
      for (int i = 1; i < pieces; ++i) add(TreePoint{k, lam * i / pieces});
    }
    const double sqrt_e = std::sqrt(static_cast<double>(E));
    const double measured = sample_lipschitz_constant(ls);
    const double lipschitz = std::max(sqrt_e, measured * (1.0 + 1e-9));
    const std::size_t sample_count = ls.size();
    const auto extension = mcshane_extend(std::move(ls), lipschitz);
    auto phi = smooth_lipschitz(extension, delta);
    report["phi_eps"] = {{"samples", sample_count},
                         {"measured_lipschitz", measured},
                         {"lipschitz", lipschitz},
                         {"beta", phi->beta()},
                         {"eta", phi->eta()},
                         {"error_bound", phi->error_bound()}};
    timer.mark("phi_eps");

    result.f_eps = std::make_shared<Approximant>(g.map, std::move(rho),
                                                 std::move(phi));
  }

  const VerifyReport v = verify(map, *result.f_eps, mask, config);
  report["sup_error_on_omega_eps"] = v.sup_error;
  report["bound_2eps"] = 2.0 * config.epsilon;
  report["verify"] = verify_to_json(v);
  timer.mark("verify");
  result.within_tolerance = v.within_bound && v.rank_pass;
  report["within_tolerance"] = result.within_tolerance;
  if (config.timings) report["timings"] = timer.json();
  result.report = std::move(report);
  return result;
}

}  // namespace rankone
