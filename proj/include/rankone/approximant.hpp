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
#include <vector>

#include "rankone/map_io.hpp"
#include "rankone/smoothing.hpp"

namespace rankone {

// f_eps = phi_eps o rho_eps o g_eps. With E = 0 the map is a constant.
class Approximant : public SmoothMap {
 public:
  Approximant(int dim, std::vector<double> constant);
  Approximant(std::shared_ptr<const TreeMollifier> g,
              std::shared_ptr<const Projection> rho,
              std::shared_ptr<const SoftMcShane> phi);

  int in_dim() const override { return dim_; }
  int out_dim() const override { return codim_; }
  void eval(std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::span<const double> x,
                std::span<double> jac) const override;
  std::string_view provenance() const override { return "composition"; }

  bool is_constant() const { return g_ == nullptr; }
  int E() const { return g_ ? g_->out_dim() : 0; }
  const TreeMollifier* g() const { return g_.get(); }
  const Projection* rho() const { return rho_.get(); }
  const SoftMcShane* phi() const { return phi_.get(); }
  const std::vector<double>& constant() const { return constant_; }

  // rho_eps(g_eps(x)).
  std::vector<double> tree_coordinates(std::span<const double> x) const;

 private:
  int dim_ = 0;
  int codim_ = 0;
  std::vector<double> constant_;
  std::shared_ptr<const TreeMollifier> g_;
  std::shared_ptr<const Projection> rho_;
  std::shared_ptr<const SoftMcShane> phi_;
};

inline constexpr int kApproxFormatVersion = 1;

Json approximant_to_json(const Approximant& f);
std::shared_ptr<const Approximant> approximant_from_json(const Json& j);

}  // namespace rankone
