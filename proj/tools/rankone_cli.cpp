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
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rankone/error.hpp"
#include "rankone/grid.hpp"
#include "rankone/map_io.hpp"
#include "rankone/pipeline.hpp"
#include "rankone/quasimetric.hpp"
#include "rankone/quotient.hpp"

namespace {

using namespace rankone;

constexpr int kExitError = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitNotATree = 3;
constexpr int kExitTolerance = 4;

std::vector<int> parse_shape(const std::string& text) {
  std::vector<int> shape;
  std::string token;
  std::stringstream in(text);
  while (std::getline(in, token, text.find('x') != std::string::npos ? 'x' : ',')) {
    shape.push_back(std::stoi(token));
  }
  if (shape.empty() || shape.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorCode::kInvalidArgument, "bad shape " + text);
  }
  return shape;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kHypothesisViolated: return kExitHypothesis;
    case ErrorCode::kNotATree: return kExitNotATree;
    case ErrorCode::kCannotMeetTolerance: return kExitTolerance;
    default: return kExitError;
  }
}

struct GenerateArgs {
  std::string map_case;
  std::string shape = "65x65";
  std::string domain = "square";
  std::string out;
  double scale = 4.0;
};

int run_generate(const GenerateArgs& args) {
  const auto shape = parse_shape(args.shape);
  const std::size_t n = shape.size();
  std::vector<double> lo(n, 0.0), hi(n, 1.0), center(n, 0.5);
  std::function<bool(std::span<const double>)> inside;
  if (args.domain == "square") {
    inside = [](std::span<const double> p) {
      for (double v : p) {
        if (!(v > 0.0 && v < 1.0)) return false;
      }
      return true;
    };
  } else if (args.domain == "disk") {
    inside = [](std::span<const double> p) {
      double r = 0.0;
      for (double v : p) r += (v - 0.5) * (v - 0.5);
      return r < 0.25;
    };
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown domain " + args.domain);
  }
  const auto domain =
      build_grid_domain(box_spec(shape, lo, hi, inside, center));
  MapParams params;
  params.scale = args.scale;
  save_map(generate_map(parse_map_case(args.map_case), domain, params),
           args.out);
  return 0;
}

struct FactorArgs {
  std::string input;
  std::string out;
  std::string graph_out;
  double tau = -1.0;
  int subdivision = 1;
  bool axis_only = false;
};

int run_factor(const FactorArgs& args) {
  const SampledMap map = load_map(args.input);
  const auto graph = build_weight_graph(map, args.subdivision, !args.axis_only);
  const double tau = args.tau >= 0.0 ? args.tau : default_zero_threshold(graph);
  const auto zf = build_quotient(graph, map, tau);
  write_json_file(quotient_to_json(zf), args.out);
  if (!args.graph_out.empty()) {
    write_json_file(graph_to_json(graph, map.domain()), args.graph_out);
  }
  return 0;
}

struct ApproxArgs {
  std::string input;
  std::string out;
  std::string report;
  std::string probes;
  std::string smoothness = "C-infinity";
  ApproxConfig config;
};

int run_approx(ApproxArgs args) {
  args.config.smoothness = parse_smoothness(args.smoothness);
  const SampledMap map = load_map(args.input);
  const ApproxResult result = approximate(map, args.config);
  if (!args.out.empty()) {
    Json j = approximant_to_json(*result.f_eps);
    j["epsilon"] = args.config.epsilon;
    write_json_file(j, args.out);
  }
  if (!args.report.empty()) write_json_file(result.report, args.report);
  if (!args.probes.empty()) {
    const NodeMask mask = compute_omega_eps(map.domain(), args.config.epsilon);
    write_probe_csv(args.probes, *result.f_eps,
                    interior_probes(map.domain(), mask,
                                    args.config.rank_probes,
                                    args.config.seed));
  }
  if (!result.within_tolerance) {
    std::cerr << "tolerance check failed: sup error "
              << result.report["sup_error_on_omega_eps"] << '\n';
    return kExitTolerance;
  }
  return 0;
}

struct VerifyArgs {
  std::string input;
  std::string approx;
  std::string report;
  ApproxConfig config;
};

int run_verify(VerifyArgs args) {
  const SampledMap map = load_map(args.input);
  const Json j = read_json_file(args.approx);
  const auto f_eps = approximant_from_json(j);
  if (!(args.config.epsilon > 0.0) && j.contains("epsilon")) {
    args.config.epsilon = j["epsilon"].get<double>();
  }
  if (f_eps->in_dim() != map.domain().dim() ||
      f_eps->out_dim() != map.codim()) {
    throw Error(ErrorCode::kFormat, "approximant does not match the map");
  }
  const NodeMask mask = compute_omega_eps(map.domain(), args.config.epsilon);
  const VerifyReport v = verify(map, *f_eps, mask, args.config);
  Json report;
  report["schema"] = "rankone.verify";
  report["version"] = kReportVersion;
  report["epsilon"] = args.config.epsilon;
  report["verify"] = verify_to_json(v);
  const bool ok = v.within_bound && v.rank_pass;
  report["within_tolerance"] = ok;
  if (!args.report.empty()) {
    write_json_file(report, args.report);
  } else {
    std::cout << report.dump(2) << '\n';
  }
  return ok ? 0 : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth rank-one approximation of sampled maps"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a generated test map");
  generate->add_option("--case", gen.map_case, "constant | monotone-line | "
                       "saddle-reeb | scaled-saddle | full-rank-counterexample")
      ->required();
  generate->add_option("--shape", gen.shape, "Node counts, e.g. 129x129");
  generate->add_option("--domain", gen.domain, "square | disk");
  generate->add_option("--scale", gen.scale, "Scale of the scaled saddle");
  generate->add_option("--out", gen.out, "Map file")->required();

  FactorArgs fac;
  auto* factor = app.add_subcommand("factor", "Build the quotient tree");
  factor->add_option("--input", fac.input, "Map file")->required();
  factor->add_option("--tau", fac.tau, "Zero threshold (default 1e-9 max weight)");
  factor->add_option("--subdivision", fac.subdivision, "Segment subdivision");
  factor->add_flag("--axis-only", fac.axis_only, "No diagonal edges");
  factor->add_option("--graph", fac.graph_out, "Optional graph dump");
  factor->add_option("--out", fac.out, "Tree file")->required();

  ApproxArgs apx;
  auto* approx = app.add_subcommand("approx", "Build and verify f_eps");
  approx->add_option("--input", apx.input, "Map file")->required();
  approx->add_option("--epsilon", apx.config.epsilon, "Target scale")->required();
  approx->add_option("--seed", apx.config.seed, "Sampling seed");
  approx->add_option("--tau", apx.config.tau, "Zero threshold");
  approx->add_option("--fd-step", apx.config.fd_step, "FD step for the rank check");
  approx->add_option("--rank-tol", apx.config.rank_tol, "sigma2/sigma1 tolerance");
  approx->add_option("--smoothness", apx.smoothness, "C-infinity | C2-polynomial");
  approx->add_flag("--strict-rank", apx.config.strict_rank,
                   "Fail on the input rank check");
  approx->add_flag("--timings", apx.config.timings, "Record stage timings");
  approx->add_option("--out", apx.out, "Approximant file");
  approx->add_option("--report", apx.report, "Report file");
  approx->add_option("--probes", apx.probes, "Probe CSV");

  VerifyArgs ver;
  ver.config.epsilon = 0.0;
  auto* verify_cmd = app.add_subcommand("verify", "Check a stored approximant");
  verify_cmd->add_option("--input", ver.input, "Map file")->required();
  verify_cmd->add_option("--approx", ver.approx, "Approximant file")->required();
  verify_cmd->add_option("--epsilon", ver.config.epsilon,
                         "Scale (default: stored value)");
  verify_cmd->add_option("--seed", ver.config.seed, "Sampling seed");
  verify_cmd->add_option("--fd-step", ver.config.fd_step, "FD step");
  verify_cmd->add_option("--report", ver.report, "Report file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*generate) return run_generate(gen);
    if (*factor) return run_factor(fac);
    if (*approx) return run_approx(apx);
    if (*verify_cmd) return run_verify(ver);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
