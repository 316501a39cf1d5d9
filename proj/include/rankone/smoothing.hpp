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

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankone/embedding.hpp"
#include "rankone/finite_tree.hpp"
#include "rankone/grid.hpp"
#include "rankone/map_io.hpp"

namespace rankone {

// Evaluable map R^p -> R^q with derivative queries.
class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;
  virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
  // Row-major out_dim x in_dim. Defaults to central differences.
  virtual void jacobian(std::span<const double> x, std::span<double> jac) const;
  // mollified-grid, clamp-product, mcshane-mollified or composition.
  virtual std::string_view provenance() const = 0;

  std::vector<double> operator()(std::span<const double> x) const;
};

// ---- bump profiles -------------------------------------------------------

enum class Smoothness {
  kInfinite,    // integral of exp(-1/(t(1-t)))
  kPolynomial,  // 6u^5 - 15u^4 + 10u^3, C^2
};

std::string_view to_string(Smoothness s);
Smoothness parse_smoothness(std::string_view name);

// Monotone blend with value 0 for u <= 0 and 1 for u >= 1.
double blend(double u, Smoothness s = Smoothness::kInfinite);
double blend_derivative(double u, Smoothness s = Smoothness::kInfinite);

// ---- clamps and the projection -------------------------------------------

class SmoothClamp {
 public:
  SmoothClamp() = default;
  SmoothClamp(double lambda, double delta,
              Smoothness smoothness = Smoothness::kInfinite);

  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  Smoothness smoothness() const { return smoothness_; }

  double operator()(double s) const;
  double derivative(double s) const;

 private:
  double lambda_ = 0.0;
  double delta_ = 0.0;
  Smoothness smoothness_ = Smoothness::kInfinite;
};

SmoothClamp make_clamp(double lambda, double delta,
                       Smoothness smoothness = Smoothness::kInfinite);

// rho(t) = (xi_1(t_1), ..., xi_E(t_E)).
class Projection : public SmoothMap {
 public:
  Projection(std::vector<SmoothClamp> clamps);

  int in_dim() const override { return static_cast<int>(clamps_.size()); }
  int out_dim() const override { return in_dim(); }
  void eval(std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::span<const double> x,
                std::span<double> jac) const override;
  std::string_view provenance() const override { return "clamp-product"; }

  const std::vector<SmoothClamp>& clamps() const { return clamps_; }
  // Diagonal entries xi_k'(t_k).
  std::vector<double> diagonal(std::span<const double> t) const;

 private:
  std::vector<SmoothClamp> clamps_;
};

Projection rho_eps(const Embedding& emb, double delta,
                   Smoothness smoothness = Smoothness::kInfinite);

// Euclidean distance from x to w(T).
double distance_to_image(const Embedding& emb, std::span<const double> x);

// Point of w(T) plus a uniform offset from the open ball of radius `radius`.
std::vector<double> sample_neighborhood(const FiniteTree& tree,
                                        const Embedding& emb, double radius,
                                        Rng& rng);

// ---- grid mollification --------------------------------------------------

// kappa = hat_h * k_sigma, where hat_h is the piecewise linear hat of width h
// and k_sigma the normalized bump of radius sigma. Products of kappa over
// axes convolve the multilinear interpolant with the product bump.
class HatKernel {
 public:
  HatKernel() = default;
  HatKernel(double h, double sigma);

  double h() const { return h_; }
  double sigma() const { return sigma_; }
  // Support is |t| < h + sigma.
  double radius() const { return h_ + sigma_; }
  double value(double t) const;
  double derivative(double t) const;

 private:
  double h_ = 1.0;
  double sigma_ = 0.0;
};

// Weights of the nodes within the kernel support of x, per axis.
struct StencilWeights {
  int dim = 0;
  std::array<int, kMaxDim> first{};
  std::array<int, kMaxDim> count{};
  std::array<std::vector<double>, kMaxDim> value;
  std::array<std::vector<double>, kMaxDim> derivative;
};

StencilWeights stencil_weights(const GridDomain& domain,
                               std::span<const HatKernel> kernels,
                               std::span<const double> x, bool derivatives);

// For every grid node, the inside node whose value it carries: itself when
// inside, else the nearest inside node by axis BFS (ties to smaller id).
std::vector<NodeId> nearest_inside(const GridDomain& domain);

class MollifiedGridMap : public SmoothMap {
 public:
  MollifiedGridMap(SampledMap map, double sigma);

  int in_dim() const override { return map_.domain().dim(); }
  int out_dim() const override { return map_.codim(); }
  void eval(std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::span<const double> x,
                std::span<double> jac) const override;
  std::string_view provenance() const override { return "mollified-grid"; }

  double sigma() const { return sigma_; }
  const SampledMap& samples() const { return map_; }

 private:
  SampledMap map_;
  double sigma_;
  std::vector<HatKernel> kernels_;
  std::vector<NodeId> source_;
};

// Largest |g(u) - g(v)| / |u - v| over axis neighbors.
double grid_lipschitz(const SampledMap& g);

struct MollifyOptions {
  int max_retries = 8;
  // Post-hoc check nodes; empty means every inside node.
  NodeMask check_region;
};

struct MollifyResult {
  std::shared_ptr<const MollifiedGridMap> map;
  double lipschitz_estimate = 0.0;
  double achieved_sup_error = 0.0;
  int retries = 0;
};

// sigma = target / L with L the largest |g(u) - g(v)| / |u - v| over axis
// neighbors, halved until the sup error over the check nodes is below target.
MollifyResult mollify_map(const SampledMap& g, double target_sup_error,
                          const MollifyOptions& options = {});

// ---- Lipschitz extension -------------------------------------------------

struct LipschitzSamples {
  int dim = 0;
  int codim = 0;
  // Row-major, dim entries per point and codim entries per value.
  std::vector<double> points;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? values.size() / codim
                                             : points.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> value(std::size_t i) const {
    return {values.data() + i * codim, static_cast<std::size_t>(codim)};
  }
};

// Largest per-component |value_j(a) - value_j(b)| / |a - b| over pairs.
double sample_lipschitz_constant(const LipschitzSamples& samples);

// F_j(x) = min_e value_j(e) + L |x - e|. Lipschitz, not smooth.
class McShaneExtension {
 public:
  McShaneExtension(LipschitzSamples samples, double lipschitz);

  int dim() const { return samples_.dim; }
  int codim() const { return samples_.codim; }
  double lipschitz() const { return lipschitz_; }
  const LipschitzSamples& samples() const { return samples_; }
  void eval(std::span<const double> x, std::span<double> out) const;

 private:
  LipschitzSamples samples_;
  double lipschitz_;
};

McShaneExtension mcshane_extend(LipschitzSamples samples, double lipschitz);

// Softmin of value_j(e) + L sqrt(|x - e|^2 + eta^2) with temperature 1/beta.
// Smooth, and within [-log(N)/beta, L eta] of the McShane extension.
class SoftMcShane : public SmoothMap {
 public:
  SoftMcShane(McShaneExtension base, double beta, double eta);

  int in_dim() const override { return base_.dim(); }
  int out_dim() const override { return base_.codim(); }
  void eval(std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::span<const double> x,
                std::span<double> jac) const override;
  std::string_view provenance() const override { return "mcshane-mollified"; }

  const McShaneExtension& base() const { return base_; }
  double beta() const { return beta_; }
  double eta() const { return eta_; }
  // A priori bound on |this - base|.
  double error_bound() const;

 private:
  McShaneExtension base_;
  double beta_;
  double eta_;
};

// beta and eta chosen so the a priori error is target / 2; the sup error over
// `probes` (the sample points when empty) is measured and must be < target.
std::shared_ptr<const SoftMcShane> smooth_lipschitz(
    const McShaneExtension& f, double target_sup_error,
    const std::vector<std::vector<double>>& probes = {});

// ---- tree-valued mollification -------------------------------------------

// Per inside node, a point of T.
struct TreeSamples {
  SampledMap embedded;  // w of the tree points, codim E
  std::vector<TreePoint> points;
};

// g_eps(x) = w(argmin_p sum_n kappa_n(x) d_T(p, g_n)^2). Values stay on w(T).
class TreeMollifier : public SmoothMap {
 public:
  TreeMollifier(const QuotientTree& zf, const FiniteTree& tree,
                const Embedding& emb, TreeSamples samples, double sigma);

  int in_dim() const override { return samples_.embedded.domain().dim(); }
  int out_dim() const override { return emb_.E; }
  void eval(std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::span<const double> x,
                std::span<double> jac) const override;
  std::string_view provenance() const override { return "mollified-grid"; }

  // The minimizing tree point together with dp/dx along its edge.
  TreePoint locate(std::span<const double> x,
                   std::span<double> gradient = {}) const;

  double sigma() const { return sigma_; }
  const TreeSamples& samples() const { return samples_; }
  const Embedding& embedding() const { return emb_; }
  const std::vector<double>& vertex_distances() const { return vdist_; }
  const std::vector<std::array<int, 2>>& edge_vertices() const {
    return edge_vertex_;
  }

  // Reconstruction from stored parts.
  TreeMollifier(Embedding emb, std::vector<std::array<int, 2>> edge_vertex,
                std::vector<double> vertex_distances, TreeSamples samples,
                double sigma);

 private:
  void init_kernels();

  Embedding emb_;
  // Endpoint vertex indices (into emb.vertices) of each edge.
  std::vector<std::array<int, 2>> edge_vertex_;
  // Vertex-to-vertex tree distances, row-major.
  std::vector<double> vdist_;
  TreeSamples samples_;
  double sigma_;
  std::vector<HatKernel> kernels_;
  std::vector<NodeId> source_;
};

struct TreeMollifyResult {
  std::shared_ptr<const TreeMollifier> map;
  double lipschitz_estimate = 0.0;
  double achieved_sup_error = 0.0;
  int retries = 0;
};

TreeMollifyResult mollify_tree_map(const QuotientTree& zf,
                                   const FiniteTree& tree,
                                   const Embedding& emb, TreeSamples samples,
                                   double target_sup_error,
                                   const MollifyOptions& options = {});

// ---- probes --------------------------------------------------------------

// Columns x_1..x_p, f_1..f_q, then d f_i / d x_j row-major.
void write_probe_csv(const std::string& path, const SmoothMap& map,
                     const std::vector<std::vector<double>>& probes);

}  // namespace rankone
