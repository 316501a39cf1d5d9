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

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rankone/embedding.hpp"
#include "rankone/error.hpp"
#include "rankone/finite_tree.hpp"
#include "rankone/pipeline.hpp"
#include "rankone/quasimetric.hpp"
#include "rankone/quotient.hpp"
#include "rankone/random.hpp"
#include "rankone/smoothing.hpp"

using namespace rankone;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

GridDomain unit_square(int nodes) {
  const double c[2] = {0.5, 0.5};
  return build_grid_domain(box_spec(
      {nodes, nodes}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        return p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0;
      },
      c));
}

GridDomain unit_disk(int nodes) {
  const double c[2] = {0.5, 0.5};
  return build_grid_domain(box_spec(
      {nodes, nodes}, {0.0, 0.0}, {1.0, 1.0},
      [](std::span<const double> p) {
        return (p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5) < 0.25;
      },
      c));
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

struct Run {
  double eps;
  ApproxResult result;
};

// Budget identity on one report. Constant runs (E = 0) have no delta.
bool budget_ok(const Json& rep, double eps, std::string& note) {
  const int E = rep["E"].get<int>();
  if (E == 0) return false;
  const double lambda = rep["lambda_min"].get<double>();
  const double delta = rep["delta"].get<double>();
  const double e = static_cast<double>(E);
  const double expected = std::min(eps / (1.0 + std::sqrt(e) + 2.0 * e), lambda / 4.0);
  const double lhs = (1.0 + std::sqrt(e) + 2.0 * e) * delta + eps;
  const bool ok = delta == expected &&
                  lhs <= 2.0 * eps * (1.0 + 4.0 * 0x1.0p-53) &&
                  rep["budget"]["holds"] == true;
  note += " E=" + std::to_string(E);
  return ok;
}

struct TreeStage {
  SampledMap map;
  QuotientTree zf;
  std::vector<ClassId> region;
  FiniteTree tree;
  Retraction r;
};

TreeStage tree_stage(const SampledMap& map, double eps) {
  TreeStage s{map, {}, {}, {}, {}};
  const auto g = build_weight_graph(map, 1, true);
  s.zf = build_quotient(g, map, default_zero_threshold(g));
  const auto mask = compute_omega_eps(map.domain(), eps);
  std::vector<std::uint8_t> seen(s.zf.class_count(), 0);
  for (NodeId v = 0; v < static_cast<NodeId>(mask.size()); ++v) {
    if (mask[v] && !seen[s.zf.class_of[v]]) {
      seen[s.zf.class_of[v]] = 1;
      s.region.push_back(s.zf.class_of[v]);
    }
  }
  std::sort(s.region.begin(), s.region.end());
  s.tree = order_edges(build_subtree(s.zf, build_eps_net(s.zf, s.region, eps)));
  s.r = retract(s.zf, s.tree);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <rankone cli> <work dir>\n");
    return 1;
  }
  const std::string cli = argv[1];
  const std::filesystem::path work = argv[2];
  std::filesystem::create_directories(work);

  const auto square = unit_square(129);
  const auto saddle = generate_map(MapCase::kSaddleReeb, square);

  // Main runs shared by criteria 1, 2 and 3.
  std::vector<Run> runs;
  for (double eps : {0.2, 0.1, 0.05}) {
    ApproxConfig config;
    config.epsilon = eps;
    runs.push_back({eps, approximate(saddle, config)});
  }

  // 1. Error budget identity.
  {
    std::vector<std::pair<std::string, Json>> cases;
    for (const auto& r : runs) {
      cases.emplace_back("saddle-reeb eps=" + fmt(r.eps), r.result.report);
    }
    const auto small_square = unit_square(65);
    ApproxConfig config;
    config.epsilon = 0.1;
    cases.emplace_back(
        "scaled-saddle eps=0.1",
        approximate(generate_map(MapCase::kScaledSaddle, small_square), config).report);
    cases.emplace_back(
        "monotone-line eps=0.1",
        approximate(generate_map(MapCase::kMonotoneLine, small_square), config).report);
    cases.emplace_back(
        "saddle-reeb disk eps=0.1",
        approximate(generate_map(MapCase::kSaddleReeb, unit_disk(65)), config).report);
    config.epsilon = 0.05;
    cases.emplace_back(
        "scaled-saddle eps=0.05",
        approximate(generate_map(MapCase::kScaledSaddle, small_square), config).report);
    int checked = 0;
    bool ok = true;
    std::string note;
    for (const auto& [name, rep] : cases) {
      if (rep["E"].get<int>() == 0) continue;
      ++checked;
      ok = budget_ok(rep, rep["config"]["epsilon"].get<double>(), note) && ok;
    }
    report(1, ok && checked >= 5,
           "delta = min(eps/(1+sqrt(E)+2E), lambda/4) and budget <= 2 eps on " +
               std::to_string(checked) + " cases;" + note);
  }

  // 2. End-to-end approximation.
  {
    bool ok = true;
    std::string note;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
      const double err = r.result.report["sup_error_on_omega_eps"].get<double>();
      const double bound = 2.0 * r.eps + 5.0 / 128.0;
      ok = ok && err <= bound && err < prev;
      prev = err;
      note += " eps=" + fmt(r.eps) + ":" + fmt(err) + "<=" + fmt(bound);
    }
    report(2, ok, "saddle 129x129 sup error on omega_eps, strictly decreasing;" + note);
  }

  // 3. Rank of f_eps at interior probes.
  {
    bool ok = true;
    std::string note;
    for (const auto& r : runs) {
      const auto& rank = r.result.report["verify"]["rank"];
      const double ratio = rank["max_sigma2_over_sigma1"].get<double>();
      ok = ok && ratio <= 1e-3 && r.result.report["verify"]["rank_pass"] == true;
      note += " eps=" + fmt(r.eps) + ":" + fmt(ratio) + " (" +
              std::to_string(rank["tested_nodes"].get<std::size_t>()) + " probes, " +
              std::to_string(rank["skipped_below_noise"].get<std::size_t>()) +
              " below noise)";
    }
    report(3, ok, "max sigma2/sigma1 <= 1e-3;" + note);
  }

  // 4. Dijkstra against Floyd-Warshall.
  {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c[2] = {0.5, 0.5};
    const auto d = build_grid_domain(box_spec({5, 5}, {0.0, 0.0}, {1.0, 1.0}, {}, c));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> values(d.node_count() * 2);
      for (auto& v : values) v = u(rng);
      const auto g = build_weight_graph(SampledMap(d, 2, values), 1, trial % 2 == 0);
      const std::size_t n = g.node_count();
      std::vector<double> fw(n * n, INFINITY);
      for (std::size_t i = 0; i < n; ++i) fw[i * n + i] = 0.0;
      for (const auto& e : g.edges()) {
        fw[e.u * n + e.v] = std::min(fw[e.u * n + e.v], e.image_weight);
        fw[e.v * n + e.u] = std::min(fw[e.v * n + e.u], e.image_weight);
      }
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            fw[i * n + j] = std::min(fw[i * n + j], fw[i * n + k] + fw[k * n + j]);
      for (std::size_t s = 0; s < n; ++s) {
        const auto row = df_single_source(g, static_cast<NodeId>(s));
        for (std::size_t t = 0; t < n; ++t) {
          worst = std::max(worst, std::abs(row[t] - fw[s * n + t]));
        }
      }
    }
    report(4, worst <= 1e-12,
           "20 random 5x5 instances, max |dijkstra - floyd-warshall| = " + fmt(worst));
  }

  const auto stage = tree_stage(saddle, 0.05);
  const auto& zf = stage.zf;

  // 5. Subtree size bounds.
  {
    bool ok = true;
    int nets = 0;
    std::mt19937_64 rng(5);
    const auto greedy = build_eps_net(zf, stage.region, 0.02);
    for (int k = 2; k <= 12; ++k) {
      std::vector<std::vector<ClassId>> candidates;
      if (static_cast<int>(greedy.size()) >= k) {
        candidates.emplace_back(greedy.begin(), greedy.begin() + k);
      }
      for (int t = 0; t < 20; ++t) {
        std::vector<ClassId> net;
        while (static_cast<int>(net.size()) < k) {
          const ClassId c = stage.region[rng() % stage.region.size()];
          if (std::find(net.begin(), net.end(), c) == net.end()) net.push_back(c);
        }
        candidates.push_back(net);
      }
      for (const auto& net : candidates) {
        const auto tree = build_subtree(zf, net);
        ++nets;
        ok = ok && tree.vertices.size() <= static_cast<std::size_t>(2 * k - 2) &&
             tree.edge_count() <= static_cast<std::size_t>(2 * k - 3);
      }
    }
    report(5, ok,
           "vertices <= 2k-2 and edges <= 2k-3 for " + std::to_string(nets) +
               " nets with k = 2..12");
  }

  // 6. Retraction.
  {
    const auto& tree = stage.tree;
    const auto& r = stage.r;
    std::vector<ClassId> on;
    for (ClassId c = 0; c < static_cast<ClassId>(zf.class_count()); ++c) {
      if (tree.on_tree(c)) on.push_back(c);
    }
    Rng rng(6);
    double lip = 0.0, dist = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto a = static_cast<ClassId>(uniform_index(rng, zf.class_count()));
      const auto b = static_cast<ClassId>(uniform_index(rng, zf.class_count()));
      lip = std::max(lip, tree_point_distance(zf, tree, r.to_tree[a], r.to_tree[b]) -
                              quotient_distance(zf, a, b));
      double best = INFINITY;
      for (ClassId t : on) best = std::min(best, quotient_distance(zf, a, t));
      dist = std::max(dist, std::abs(r.displacement[a] - best));
    }
    double move = 0.0, outside = 0.0;
    for (ClassId c : stage.region) move = std::max(move, r.displacement[c]);
    for (double v : r.displacement) outside = std::max(outside, v);
    report(6, lip <= 1e-9 && dist <= 1e-9 && move < 0.05,
           "10^4 pairs: lipschitz excess " + fmt(lip) + ", |d(x,r(x)) - dist(x,T)| " +
               fmt(dist) + ", max displacement " + fmt(move) +
               " < eps 0.05 on omega_eps classes (" + fmt(outside) + " overall)");
  }

  // 7. Embedding isometry.
  const auto emb = embed_tree(stage.tree);
  {
    Rng rng(7);
    std::vector<std::pair<TreePoint, TreePoint>> pairs;
    for (int i = 0; i < 10000; ++i) {
      pairs.emplace_back(random_tree_point(stage.tree, rng),
                         random_tree_point(stage.tree, rng));
    }
    const auto check = tree_l1_check(zf, stage.tree, emb, pairs);
    const double root_e = std::sqrt(static_cast<double>(emb.E));
    report(7, check.l1_defect <= 1e-9 && check.inverse_lipschitz <= root_e + 1e-6,
           "E=" + std::to_string(emb.E) + ", l1 defect " + fmt(check.l1_defect) +
               ", inverse lipschitz " + fmt(check.inverse_lipschitz) +
               " <= sqrt(E) " + fmt(root_e));
  }

  // 8. Projection invariants.
  {
    const double delta = compute_delta(0.05, emb.E, stage.tree.lambda_min);
    const auto rho = rho_eps(emb, delta);
    const double bound = 2.0 * std::sqrt(static_cast<double>(emb.E)) * delta;
    Rng rng(8);
    double member = 0.0, move = 0.0;
    int multi = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto t = sample_neighborhood(stage.tree, emb, delta, rng);
      const auto y = rho(t);
      member = std::max(member, distance_to_image(emb, y));
      double m = 0.0;
      for (int k = 0; k < emb.E; ++k) m += (y[k] - t[k]) * (y[k] - t[k]);
      move = std::max(move, std::sqrt(m));
      const auto diag = rho.diagonal(t);
      if (std::count_if(diag.begin(), diag.end(),
                        [](double v) { return std::abs(v) > 1e-9; }) > 1) {
        ++multi;
      }
    }
    report(8, member <= 1e-9 && move <= bound && multi == 0,
           "10^4 probes in V_delta: distance to w(T) " + fmt(member) +
               ", displacement " + fmt(move) + " <= " + fmt(bound) + ", " +
               std::to_string(multi) + " probes with two active clamps");
  }

  // 9. Negative control.
  {
    const auto identity =
        generate_map(MapCase::kFullRankCounterexample, unit_square(65));
    const auto g = build_weight_graph(identity, 1, true);
    const auto q = build_quotient(g, identity, default_zero_threshold(g));
    const auto check = check_tree(q, 20000, 0.1 * g.max_image_weight(), 1);
    const auto map_path = work / "identity.json";
    int gen = run(quote(cli) + " generate --case full-rank-counterexample --shape 65x65 --out " +
                  quote(map_path));
    int code = run(quote(cli) + " approx --strict-rank --epsilon 0.1 --input " +
                   quote(map_path) + " --out " + quote(work / "identity_approx.json") +
                   " --report " + quote(work / "identity_report.json"));
    report(9, !check.pass && check.max_four_point_defect > 0.0 && gen == 0 && code == 2,
           "identity four-point defect " + fmt(check.max_four_point_defect) +
               ", strict approx exit code " + std::to_string(code));
  }

  // 10. Determinism.
  {
    const auto map_path = work / "saddle.json";
    int gen = run(quote(cli) + " generate --case saddle-reeb --shape 65x65 --out " +
                  quote(map_path));
    int a = -1, b = -1;
    if (gen == 0) {
      a = run(quote(cli) + " approx --epsilon 0.1 --input " + quote(map_path) +
              " --out " + quote(work / "a1.json") + " --report " + quote(work / "r1.json"));
      b = run(quote(cli) + " approx --epsilon 0.1 --input " + quote(map_path) +
              " --out " + quote(work / "a2.json") + " --report " + quote(work / "r2.json"));
    }
    const auto r1 = slurp(work / "r1.json");
    const auto r2 = slurp(work / "r2.json");
    ApproxConfig config;
    config.epsilon = 0.1;
    const bool lib = approximate(saddle, config).report.dump() == runs[1].result.report.dump();
    report(10, a == 0 && b == 0 && !r1.empty() && r1 == r2 && lib,
           "two CLI runs give byte-identical reports (" + std::to_string(r1.size()) +
               " bytes) and repeated library runs match");
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
