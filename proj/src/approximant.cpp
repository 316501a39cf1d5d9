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

#include "rankone/approximant.hpp"

#include <algorithm>

#include "rankone/error.hpp"

namespace rankone {

Approximant::Approximant(int dim, std::vector<double> constant)
    : dim_(dim),
      codim_(static_cast<int>(constant.size())),
      constant_(std::move(constant)) {}

Approximant::Approximant(std::shared_ptr<const TreeMollifier> g,
                         std::shared_ptr<const Projection> rho,
                         std::shared_ptr<const SoftMcShane> phi)
    : dim_(g->in_dim()),
      codim_(phi->out_dim()),
      g_(std::move(g)),
      rho_(std::move(rho)),
      phi_(std::move(phi)) {
  if (rho_->in_dim() != g_->out_dim() || phi_->in_dim() != g_->out_dim()) {
    throw Error(ErrorCode::kInvalidArgument, "composition sizes disagree");
  }
}

std::vector<double> Approximant::tree_coordinates(
    std::span<const double> x) const {
  if (!g_) return {};
  std::vector<double> y(g_->out_dim()), t(g_->out_dim());
  g_->eval(x, y);
  rho_->eval(y, t);
  return t;
}

void Approximant::eval(std::span<const double> x, std::span<double> out) const {
  if (!g_) {
    std::copy(constant_.begin(), constant_.end(), out.begin());
    return;
  }
  phi_->eval(tree_coordinates(x), out);
}

void Approximant::jacobian(std::span<const double> x,
                           std::span<double> jac) const {
  const int n = dim_;
  const int m = codim_;
  std::fill(jac.begin(), jac.begin() + n * m, 0.0);
  if (!g_) return;
  const int e = g_->out_dim();
  std::vector<double> y(e), t(e), jg(static_cast<std::size_t>(e) * n),
      jphi(static_cast<std::size_t>(m) * e);
  g_->eval(x, y);
  g_->jacobian(x, jg);
  rho_->eval(y, t);
  const auto diag = rho_->diagonal(y);
  phi_->jacobian(t, jphi);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < e; ++k) {
      const double c = jphi[j * e + k] * diag[k];
      if (c == 0.0) continue;
      for (int a = 0; a < n; ++a) jac[j * n + a] += c * jg[k * n + a];
    }
  }
}

Json approximant_to_json(const Approximant& f) {
  Json j;
  j["version"] = kApproxFormatVersion;
  j["dim"] = f.in_dim();
  j["codim"] = f.out_dim();
  j["E"] = f.E();
  if (f.is_constant()) {
    j["constant"] = f.constant();
    return j;
  }
  const TreeMollifier& g = *f.g();
  const TreeSamples& samples = g.samples();
  Json domain = map_to_json(samples.embedded);
  domain.erase("codim");
  domain.erase("values");
  j["domain"] = std::move(domain);
  j["embedding"] = embedding_to_json(g.embedding());
  Json ev = Json::array();
  for (const auto& e : g.edge_vertices()) ev.push_back(Json::array({e[0], e[1]}));
  j["edge_vertices"] = std::move(ev);
  j["vertex_distances"] = g.vertex_distances();
  std::vector<int> edges;
  std::vector<double> offsets;
  for (const auto& p : samples.points) {
    edges.push_back(p.edge);
    offsets.push_back(p.offset);
  }
  j["g_samples"] = {{"edge", edges}, {"offset", offsets}};
  j["kernel_sigma"] = g.sigma();

  Json clamps = Json::array();
  for (const auto& c : f.rho()->clamps()) {
    clamps.push_back({{"lambda", c.lambda()},
                      {"delta", c.delta()},
                      {"smoothness", to_string(c.smoothness())}});
  }
  j["clamps"] = std::move(clamps);

  const SoftMcShane& phi = *f.phi();
  const auto& s = phi.base().samples();
  j["mcshane"] = {{"lipschitz", phi.base().lipschitz()},
                  {"beta", phi.beta()},
                  {"eta", phi.eta()},
                  {"points", s.points},
                  {"values", s.values}};
  return j;
}

std::shared_ptr<const Approximant> approximant_from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != kApproxFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported approximant version");
    }
    const int dim = j.at("dim").get<int>();
    const int codim = j.at("codim").get<int>();
    const int e = j.at("E").get<int>();
    if (e == 0) {
      return std::make_shared<Approximant>(
          dim, j.at("constant").get<std::vector<double>>());
    }
    Json domain_json = j.at("domain");
    const auto runs = domain_json.at("inside").get<std::vector<std::size_t>>();
    std::size_t inside = 0;
    for (std::size_t r = 1; r < runs.size(); r += 2) inside += runs[r];
    domain_json["codim"] = 1;
    domain_json["values"] = std::vector<double>(inside, 0.0);
    const GridDomain domain = map_from_json(domain_json).domain();

    Embedding emb;
    const Json& je = j.at("embedding");
    emb.E = je.at("E").get<int>();
    for (const auto& edge : je.at("edges")) {
      emb.base.push_back(edge.at("base").get<std::vector<double>>());
      emb.lambda.push_back(edge.at("lambda").get<double>());
    }
    for (const auto& v : je.at("vertices")) {
      emb.vertices.push_back(v.at("class").get<ClassId>());
      emb.vertex_images.push_back(v.at("image").get<std::vector<double>>());
    }
    std::vector<std::array<int, 2>> edge_vertex;
    for (const auto& ev : j.at("edge_vertices")) {
      edge_vertex.push_back({ev.at(0).get<int>(), ev.at(1).get<int>()});
    }

    TreeSamples samples;
    const auto edges = j.at("g_samples").at("edge").get<std::vector<int>>();
    const auto offsets =
        j.at("g_samples").at("offset").get<std::vector<double>>();
    if (edges.size() != domain.node_count() || offsets.size() != edges.size()) {
      throw Error(ErrorCode::kFormat, "g samples do not match the domain");
    }
    std::vector<double> values;
    values.reserve(edges.size() * e);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      samples.points.push_back(TreePoint{edges[i], offsets[i]});
      const auto w = embed_point(emb, samples.points.back());
      values.insert(values.end(), w.begin(), w.end());
    }
    samples.embedded = SampledMap(domain, e, std::move(values));
    auto g = std::make_shared<TreeMollifier>(
        std::move(emb), std::move(edge_vertex),
        j.at("vertex_distances").get<std::vector<double>>(), std::move(samples),
        j.at("kernel_sigma").get<double>());

    std::vector<SmoothClamp> clamps;
    for (const auto& c : j.at("clamps")) {
      clamps.emplace_back(
          c.at("lambda").get<double>(), c.at("delta").get<double>(),
          parse_smoothness(c.at("smoothness").get<std::string>()));
    }
    auto rho = std::make_shared<Projection>(std::move(clamps));

    const Json& jm = j.at("mcshane");
    LipschitzSamples ls;
    ls.dim = e;
    ls.codim = codim;
    ls.points = jm.at("points").get<std::vector<double>>();
    ls.values = jm.at("values").get<std::vector<double>>();
    auto phi = std::make_shared<SoftMcShane>(
        McShaneExtension(std::move(ls), jm.at("lipschitz").get<double>()),
        jm.at("beta").get<double>(), jm.at("eta").get<double>());
    return std::make_shared<Approximant>(std::move(g), std::move(rho),
                                         std::move(phi));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kFormat, ex.what());
  }
}

}  // namespace rankone
