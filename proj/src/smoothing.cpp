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

#include "rankone/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>

#include "rankone/error.hpp"

namespace rankone {
namespace {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  static constexpr int kOrder = 24;
  std::array<double, kOrder> node{};
  std::array<double, kOrder> weight{};

  GaussLegendre() {
    const int n = kOrder;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss() {
  static const GaussLegendre rule;
  return rule;
}

// Integral of f over [a, b] split into `panels` equal pieces.
template <class F>
double integrate(F&& f, double a, double b, int panels) {
  const auto& g = gauss();
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double s = 0.0;
    for (int i = 0; i < GaussLegendre::kOrder; ++i) {
      s += g.weight[i] * f(mid + 0.5 * width * g.node[i]);
    }
    total += 0.5 * width * s;
  }
  return total;
}

constexpr int kPanels = 4;

// b(t) = exp(-1/(t(1-t))) on (0, 1).
double transition_bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

double transition_mass() {
  static const double mass = integrate(transition_bump, 0.0, 1.0, kPanels);
  return mass;
}

// k(u) = exp(-1/(1-u^2)) on (-1, 1), unnormalized.
double kernel_bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double kernel_mass() {
  static const double mass = integrate(kernel_bump, -1.0, 1.0, kPanels);
  return mass;
}

// Normalized primitives of k and u k, from -1.
double kernel_p0(double v) {
  if (v <= -1.0) return 0.0;
  if (v >= 1.0) return 1.0;
  if (v > 0.0) return 1.0 - kernel_p0(-v);
  return integrate(kernel_bump, -1.0, v, kPanels) / kernel_mass();
}

double kernel_p1(double v) {
  if (v <= -1.0 || v >= 1.0) return 0.0;
  // u k(u) is odd, so the primitive is even.
  v = -std::abs(v);
  return integrate([](double u) { return u * kernel_bump(u); }, -1.0, v,
                   kPanels) /
         kernel_mass();
}

double norm2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

double gaussian(Rng& rng) {
  const double u1 = uniform_real(rng, 0.0, 1.0);
  const double u2 = uniform_real(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

// ---- SmoothMap -------------------------------------------------------------

void SmoothMap::jacobian(std::span<const double> x,
                         std::span<double> jac) const {
  const int p = in_dim();
  const int q = out_dim();
  std::vector<double> y(x.begin(), x.end()), lo(q), hi(q);
  for (int a = 0; a < p; ++a) {
    const double step = 1e-6 * std::max(1.0, std::abs(x[a]));
    y[a] = x[a] - step;
    eval(y, lo);
    y[a] = x[a] + step;
    eval(y, hi);
    y[a] = x[a];
    for (int j = 0; j < q; ++j) jac[j * p + a] = (hi[j] - lo[j]) / (2.0 * step);
  }
}

std::vector<double> SmoothMap::operator()(std::span<const double> x) const {
  std::vector<double> out(out_dim());
  eval(x, out);
  return out;
}

// ---- blends and clamps -----------------------------------------------------

std::string_view to_string(Smoothness s) {
  return s == Smoothness::kInfinite ? "C-infinity" : "C2-polynomial";
}

Smoothness parse_smoothness(std::string_view name) {
  if (name == "C-infinity" || name == "infinite") return Smoothness::kInfinite;
  if (name == "C2-polynomial" || name == "polynomial") {
    return Smoothness::kPolynomial;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown smoothness " + std::string(name));
}

double blend(double u, Smoothness s) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (s == Smoothness::kPolynomial) {
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
  }
  if (u > 0.5) return 1.0 - blend(1.0 - u, s);
  return integrate(transition_bump, 0.0, u, kPanels) / transition_mass();
}

double blend_derivative(double u, Smoothness s) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  if (s == Smoothness::kPolynomial) {
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
  }
  return transition_bump(u) / transition_mass();
}

SmoothClamp::SmoothClamp(double lambda, double delta, Smoothness smoothness)
    : lambda_(lambda), delta_(delta), smoothness_(smoothness) {
  if (!(delta > 0.0) || !(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "clamp needs positive lambda and delta");
  }
  if (delta > 0.25 * lambda * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kDeltaTooLarge,
                "delta " + std::to_string(delta) + " exceeds lambda/4 = " +
                    std::to_string(0.25 * lambda));
  }
}

double SmoothClamp::operator()(double s) const {
  const double d = delta_;
  const double l = lambda_;
  if (s <= d) return 0.0;
  if (s < 2.0 * d) return blend((s - d) / d, smoothness_) * s;
  if (s <= l - 2.0 * d) return s;
  if (s < l - d) {
    return s + blend((s - (l - 2.0 * d)) / d, smoothness_) * (l - s);
  }
  return l;
}

double SmoothClamp::derivative(double s) const {
  const double d = delta_;
  const double l = lambda_;
  if (s <= d) return 0.0;
  if (s < 2.0 * d) {
    const double u = (s - d) / d;
    return blend_derivative(u, smoothness_) * s / d + blend(u, smoothness_);
  }
  if (s <= l - 2.0 * d) return 1.0;
  if (s < l - d) {
    const double u = (s - (l - 2.0 * d)) / d;
    return 1.0 + blend_derivative(u, smoothness_) * (l - s) / d -
           blend(u, smoothness_);
  }
  return 0.0;
}

SmoothClamp make_clamp(double lambda, double delta, Smoothness smoothness) {
  return SmoothClamp(lambda, delta, smoothness);
}

Projection::Projection(std::vector<SmoothClamp> clamps)
    : clamps_(std::move(clamps)) {}

void Projection::eval(std::span<const double> x, std::span<double> out) const {
  for (std::size_t k = 0; k < clamps_.size(); ++k) out[k] = clamps_[k](x[k]);
}

void Projection::jacobian(std::span<const double> x,
                          std::span<double> jac) const {
  const std::size_t e = clamps_.size();
  std::fill(jac.begin(), jac.begin() + e * e, 0.0);
  for (std::size_t k = 0; k < e; ++k) jac[k * e + k] = clamps_[k].derivative(x[k]);
}

std::vector<double> Projection::diagonal(std::span<const double> t) const {
  std::vector<double> d(clamps_.size());
  for (std::size_t k = 0; k < clamps_.size(); ++k) {
    d[k] = clamps_[k].derivative(t[k]);
  }
  return d;
}

Projection rho_eps(const Embedding& emb, double delta, Smoothness smoothness) {
  std::vector<SmoothClamp> clamps;
  for (double l : emb.lambda) clamps.emplace_back(l, delta, smoothness);
  return Projection(std::move(clamps));
}

double distance_to_image(const Embedding& emb, std::span<const double> x) {
  if (emb.E == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < emb.E; ++k) {
    const auto& b = emb.base[k];
    double s = 0.0;
    for (int j = 0; j < emb.E && s < best; ++j) {
      double diff = x[j] - b[j];
      if (j == k) diff -= std::clamp(diff, 0.0, emb.lambda[k]);
      s += diff * diff;
    }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

std::vector<double> sample_neighborhood(const FiniteTree& tree,
                                        const Embedding& emb, double radius,
                                        Rng& rng) {
  auto x = embed_point(emb, random_tree_point(tree, rng));
  if (emb.E == 0) return x;
  std::vector<double> dir(emb.E);
  double len = 0.0;
  while (len == 0.0) {
    for (double& v : dir) v = gaussian(rng);
    len = std::sqrt(norm2(dir, std::vector<double>(emb.E, 0.0)));
  }
  const double r = radius * (1.0 - 1e-12) *
                   std::pow(uniform_real(rng, 0.0, 1.0), 1.0 / emb.E);
  for (int j = 0; j < emb.E; ++j) x[j] += r * dir[j] / len;
  return x;
}

// ---- grid kernels --------------------------------------------------------

HatKernel::HatKernel(double h, double sigma) : h_(h), sigma_(sigma) {
  if (!(h > 0.0) || !(sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel needs h > 0, sigma >= 0");
  }
}

double HatKernel::value(double t) const {
  const double h = h_;
  if (std::abs(t) >= h + sigma_) return 0.0;
  if (sigma_ == 0.0) return std::max(0.0, 1.0 - std::abs(t) / h);
  auto p0 = [&](double u) { return kernel_p0(u / sigma_); };
  auto p1 = [&](double u) { return sigma_ * kernel_p1(u / sigma_); };
  return (1.0 - t / h) * (p0(t) - p0(t - h)) + (p1(t) - p1(t - h)) / h +
         (1.0 + t / h) * (p0(t + h) - p0(t)) - (p1(t + h) - p1(t)) / h;
}

double HatKernel::derivative(double t) const {
  const double h = h_;
  if (std::abs(t) >= h + sigma_) return 0.0;
  if (sigma_ == 0.0) {
    if (std::abs(t) >= h || t == 0.0) return 0.0;
    return t > 0.0 ? -1.0 / h : 1.0 / h;
  }
  auto p0 = [&](double u) { return kernel_p0(u / sigma_); };
  return (p0(t + h) - 2.0 * p0(t) + p0(t - h)) / h;
}

StencilWeights stencil_weights(const GridDomain& domain,
                               std::span<const HatKernel> kernels,
                               std::span<const double> x, bool derivatives) {
  StencilWeights w;
  w.dim = domain.dim();
  for (int a = 0; a < w.dim; ++a) {
    const double h = domain.spacing()[a];
    const double u = (x[a] - domain.origin()[a]) / h;
    const double r = kernels[a].radius() / h;
    const int lo = static_cast<int>(std::floor(u - r)) + 1;
    const int hi = static_cast<int>(std::ceil(u + r)) - 1;
    w.first[a] = lo;
    w.count[a] = std::max(0, hi - lo + 1);
    w.value[a].resize(w.count[a]);
    if (derivatives) w.derivative[a].resize(w.count[a]);
    for (int i = 0; i < w.count[a]; ++i) {
      const double t = x[a] - (domain.origin()[a] + (lo + i) * h);
      w.value[a][i] = kernels[a].value(t);
      if (derivatives) w.derivative[a][i] = kernels[a].derivative(t);
    }
  }
  return w;
}

std::vector<NodeId> nearest_inside(const GridDomain& domain) {
  const int n = domain.dim();
  std::vector<NodeId> source(domain.grid_size(), -1);
  std::deque<std::size_t> queue;
  for (NodeId v = 0; v < static_cast<NodeId>(domain.node_count()); ++v) {
    source[domain.flat_of(v)] = v;
    queue.push_back(domain.flat_of(v));
  }
  std::array<int, kMaxDim> off{};
  while (!queue.empty()) {
    const std::size_t f = queue.front();
    queue.pop_front();
    for (int a = 0; a < n; ++a) {
      for (int s : {-1, 1}) {
        off.fill(0);
        off[a] = s;
        const auto g = domain.shifted(f, std::span<const int>(off.data(), n));
        if (g < 0 || source[g] >= 0) continue;
        source[g] = source[f];
        queue.push_back(static_cast<std::size_t>(g));
      }
    }
  }
  return source;
}

namespace {

// Visits every node of the stencil with its product weight and gradient.
template <class Visit>
void for_each_stencil_node(const GridDomain& domain, const StencilWeights& w,
                           bool derivatives, Visit&& visit) {
  const int n = w.dim;
  std::array<int, kMaxDim> i{};
  std::array<int, kMaxDim> idx{};
  std::array<double, kMaxDim> grad{};
  for (int a = 0; a < n; ++a) {
    if (w.count[a] == 0) return;
  }
  for (;;) {
    double weight = 1.0;
    for (int a = 0; a < n; ++a) weight *= w.value[a][i[a]];
    bool any = weight != 0.0;
    if (derivatives) {
      for (int a = 0; a < n; ++a) {
        double g = w.derivative[a][i[a]];
        for (int b = 0; b < n; ++b) {
          if (b != a) g *= w.value[b][i[b]];
        }
        grad[a] = g;
        any = any || g != 0.0;
      }
    }
    if (any) {
      for (int a = 0; a < n; ++a) {
        idx[a] = std::clamp(w.first[a] + i[a], 0, domain.shape()[a] - 1);
      }
      visit(domain.flat_index(std::span<const int>(idx.data(), n)), weight,
            std::span<const double>(grad.data(), n));
    }
    int a = n - 1;
    while (a >= 0 && ++i[a] == w.count[a]) i[a--] = 0;
    if (a < 0) break;
  }
}

}  // namespace

MollifiedGridMap::MollifiedGridMap(SampledMap map, double sigma)
    : map_(std::move(map)), sigma_(sigma) {
  for (double h : map_.domain().spacing()) kernels_.emplace_back(h, sigma);
  source_ = nearest_inside(map_.domain());
}

void MollifiedGridMap::eval(std::span<const double> x,
                            std::span<double> out) const {
  const auto w = stencil_weights(map_.domain(), kernels_, x, false);
  std::fill(out.begin(), out.end(), 0.0);
  for_each_stencil_node(map_.domain(), w, false,
                        [&](std::size_t flat, double weight, auto) {
                          const auto v = map_.value(source_[flat]);
                          for (int j = 0; j < map_.codim(); ++j) {
                            out[j] += weight * v[j];
                          }
                        });
}

void MollifiedGridMap::jacobian(std::span<const double> x,
                                std::span<double> jac) const {
  const int n = in_dim();
  const int m = out_dim();
  const auto w = stencil_weights(map_.domain(), kernels_, x, true);
  std::fill(jac.begin(), jac.begin() + n * m, 0.0);
  for_each_stencil_node(
      map_.domain(), w, true,
      [&](std::size_t flat, double, std::span<const double> grad) {
        const auto v = map_.value(source_[flat]);
        for (int j = 0; j < m; ++j) {
          for (int a = 0; a < n; ++a) jac[j * n + a] += grad[a] * v[j];
        }
      });
}

double grid_lipschitz(const SampledMap& g) {
  const GridDomain& d = g.domain();
  const int n = d.dim();
  double lip = 0.0;
  std::array<int, kMaxDim> off{};
  for (NodeId u = 0; u < static_cast<NodeId>(d.node_count()); ++u) {
    for (int a = 0; a < n; ++a) {
      off.fill(0);
      off[a] = 1;
      const auto f = d.shifted(d.flat_of(u), std::span<const int>(off.data(), n));
      if (f < 0) continue;
      const NodeId v = d.node_of(static_cast<std::size_t>(f));
      if (v < 0) continue;
      lip = std::max(lip, std::sqrt(norm2(g.value(u), g.value(v))) /
                              d.spacing()[a]);
    }
  }
  return lip;
}

MollifyResult mollify_map(const SampledMap& g, double target_sup_error,
                          const MollifyOptions& options) {
  if (!(target_sup_error > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target must be positive");
  }
  const GridDomain& d = g.domain();
  const double hmax = *std::max_element(d.spacing().begin(), d.spacing().end());
  MollifyResult result;
  result.lipschitz_estimate = grid_lipschitz(g);
  double sigma = result.lipschitz_estimate > 0.0
                     ? target_sup_error / result.lipschitz_estimate
                     : hmax;
  sigma = std::min(sigma, 2.0 * hmax);
  std::vector<double> x(d.dim()), y(g.codim());
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    auto map = std::make_shared<MollifiedGridMap>(g, sigma);
    double worst = 0.0;
    for (NodeId v = 0; v < static_cast<NodeId>(d.node_count()); ++v) {
      if (!options.check_region.empty() && !options.check_region[v]) continue;
      d.point(d.flat_of(v), x);
      map->eval(x, y);
      worst = std::max(worst, std::sqrt(norm2(y, g.value(v))));
    }
    if (worst < target_sup_error) {
      result.map = std::move(map);
      result.achieved_sup_error = worst;
      result.retries = attempt;
      return result;
    }
    sigma *= 0.5;
  }
  throw Error(ErrorCode::kCannotMeetTolerance,
              "mollification missed the target after retries");
}

// ---- Lipschitz extension ---------------------------------------------------

double sample_lipschitz_constant(const LipschitzSamples& s) {
  double lip = 0.0;
  const std::size_t n = s.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dist = std::sqrt(norm2(s.point(a), s.point(b)));
      const auto va = s.value(a);
      const auto vb = s.value(b);
      double gap = 0.0;
      for (int j = 0; j < s.codim; ++j) gap = std::max(gap, std::abs(va[j] - vb[j]));
      if (gap == 0.0) continue;
      lip = dist > 0.0 ? std::max(lip, gap / dist)
                       : std::numeric_limits<double>::infinity();
    }
  }
  return lip;
}

McShaneExtension::McShaneExtension(LipschitzSamples samples, double lipschitz)
    : samples_(std::move(samples)), lipschitz_(lipschitz) {}

void McShaneExtension::eval(std::span<const double> x,
                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < samples_.size(); ++e) {
    const double r = std::sqrt(norm2(x, samples_.point(e)));
    const auto v = samples_.value(e);
    for (int j = 0; j < codim(); ++j) {
      out[j] = std::min(out[j], v[j] + lipschitz_ * r);
    }
  }
}

McShaneExtension mcshane_extend(LipschitzSamples samples, double lipschitz) {
  if (samples.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no samples");
  }
  if (!(lipschitz >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "negative Lipschitz constant");
  }
  const std::size_t n = samples.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dist = std::sqrt(norm2(samples.point(a), samples.point(b)));
      const auto va = samples.value(a);
      const auto vb = samples.value(b);
      for (int j = 0; j < samples.codim; ++j) {
        if (std::abs(va[j] - vb[j]) > lipschitz * dist + 1e-12) {
          throw Error(ErrorCode::kSamplesNotLipschitz,
                      "samples " + std::to_string(a) + " and " +
                          std::to_string(b) + " violate the constant");
        }
      }
    }
  }
  return McShaneExtension(std::move(samples), lipschitz);
}

SoftMcShane::SoftMcShane(McShaneExtension base, double beta, double eta)
    : base_(std::move(base)), beta_(beta), eta_(eta) {}

double SoftMcShane::error_bound() const {
  const double n = static_cast<double>(base_.samples().size());
  return std::max(std::log(n) / beta_, base_.lipschitz() * eta_);
}

void SoftMcShane::eval(std::span<const double> x, std::span<double> out) const {
  const auto& s = base_.samples();
  const std::size_t n = s.size();
  const double l = base_.lipschitz();
  std::vector<double> cone(n);
  for (std::size_t e = 0; e < n; ++e) {
    cone[e] = l * std::sqrt(norm2(x, s.point(e)) + eta_ * eta_);
  }
  for (int j = 0; j < base_.codim(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < n; ++e) lo = std::min(lo, s.value(e)[j] + cone[e]);
    double sum = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      sum += std::exp(-beta_ * (s.value(e)[j] + cone[e] - lo));
    }
    out[j] = lo - std::log(sum) / beta_;
  }
}

void SoftMcShane::jacobian(std::span<const double> x,
                           std::span<double> jac) const {
  const auto& s = base_.samples();
  const std::size_t n = s.size();
  const int p = in_dim();
  const double l = base_.lipschitz();
  std::vector<double> cone(n), radius(n);
  for (std::size_t e = 0; e < n; ++e) {
    radius[e] = std::sqrt(norm2(x, s.point(e)) + eta_ * eta_);
    cone[e] = l * radius[e];
  }
  std::vector<double> weight(n);
  for (int j = 0; j < base_.codim(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < n; ++e) lo = std::min(lo, s.value(e)[j] + cone[e]);
    double sum = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      weight[e] = std::exp(-beta_ * (s.value(e)[j] + cone[e] - lo));
      sum += weight[e];
    }
    for (int a = 0; a < p; ++a) {
      double g = 0.0;
      for (std::size_t e = 0; e < n; ++e) {
        g += weight[e] * l * (x[a] - s.point(e)[a]) / radius[e];
      }
      jac[j * p + a] = g / sum;
    }
  }
}

std::shared_ptr<const SoftMcShane> smooth_lipschitz(
    const McShaneExtension& f, double target_sup_error,
    const std::vector<std::vector<double>>& probes) {
  if (!(target_sup_error > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target must be positive");
  }
  const double n = static_cast<double>(f.samples().size());
  const double half = 0.5 * target_sup_error;
  const double beta = std::max(std::log(std::max(n, 2.0)), 1.0) / half;
  const double eta = f.lipschitz() > 0.0 ? half / f.lipschitz() : half;
  auto smooth = std::make_shared<SoftMcShane>(f, beta, eta);

  std::vector<double> a(f.codim()), b(f.codim());
  double worst = 0.0;
  auto probe = [&](std::span<const double> x) {
    f.eval(x, a);
    smooth->eval(x, b);
    worst = std::max(worst, std::sqrt(norm2(a, b)));
  };
  if (probes.empty()) {
    for (std::size_t e = 0; e < f.samples().size(); ++e) {
      probe(f.samples().point(e));
    }
  } else {
    for (const auto& x : probes) probe(x);
  }
  if (!(worst < target_sup_error)) {
    throw Error(ErrorCode::kCannotMeetTolerance,
                "smoothed extension error " + std::to_string(worst));
  }
  return smooth;
}

// ---- probes ----------------------------------------------------------------

void write_probe_csv(const std::string& path, const SmoothMap& map,
                     const std::vector<std::vector<double>>& probes) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFormat, "cannot write " + path);
  const int p = map.in_dim();
  const int q = map.out_dim();
  for (int a = 0; a < p; ++a) out << (a ? "," : "") << "x" << a + 1;
  for (int j = 0; j < q; ++j) out << ",f" << j + 1;
  for (int j = 0; j < q; ++j) {
    for (int a = 0; a < p; ++a) out << ",df" << j + 1 << "_dx" << a + 1;
  }
  out << '\n';
  std::vector<double> y(q), jac(static_cast<std::size_t>(p) * q);
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const auto& x : probes) {
    map.eval(x, y);
    map.jacobian(x, jac);
    for (int a = 0; a < p; ++a) {
      if (a) out << ',';
      put(x[a]);
    }
    for (double v : y) {
      out << ',';
      put(v);
    }
    for (double v : jac) {
      out << ',';
      put(v);
    }
    out << '\n';
  }
}

}  // namespace rankone
