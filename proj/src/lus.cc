// Copyright 2026 The dpfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpfl/lus.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dpfl/errors.h"

namespace dpfl {

void SparsityConfig::Validate() const {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw ConfigError("sparsity.c must lie in [0, 1)");
  }
}

std::size_t KeepCount(std::size_t layer_dim, double sparsity) {
  if (layer_dim == 0) return 0;
  const double d = static_cast<double>(layer_dim);
  const double exact = (1.0 - sparsity) * d;
  const double keep = std::ceil(exact - 1e-9 * std::max(1.0, d));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(keep, 1.0)),
                                 1, layer_dim);
}

std::size_t UpdateMask::LayerPopcount(std::size_t layer) const {
  std::size_t n = 0;
  for (double v : bits.layer(layer)) n += v != 0.0 ? 1 : 0;
  return n;
}

std::size_t UpdateMask::Popcount() const {
  std::size_t n = 0;
  for (double v : bits.values()) n += v != 0.0 ? 1 : 0;
  return n;
}

UpdateMask UpdateMask::Ones(const ParamVector& like) {
  UpdateMask mask{ParamVector::ZerosLike(like)};
  for (double& v : mask.bits.values()) v = 1.0;
  return mask;
}

ParamVector UtilityCost(const ParamVector& grad, const ParamVector& update) {
  grad.RequireSameLayout(update, "utility cost");
  ParamVector cost = ParamVector::ZerosLike(update);
  for (std::size_t i = 0; i < cost.dim(); ++i) {
    cost[i] = std::fabs(grad[i] * update[i]);
  }
  return cost;
}

UpdateMask BuildMask(const ParamVector& costs, const SparsityConfig& cfg) {
  cfg.Validate();
  if (!costs.AllFinite()) throw DataError("utility costs are not finite");
  UpdateMask mask{ParamVector::ZerosLike(costs)};
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < costs.num_layers(); ++j) {
    std::span<const double> c = costs.layer(j);
    std::span<double> m = mask.bits.layer(j);
    const std::size_t keep = KeepCount(c.size(), cfg.sparsity);
    if (keep == c.size()) {
      std::fill(m.begin(), m.end(), 1.0);
      continue;
    }
    order.resize(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Strict total order: cost descending, then index ascending.
    auto before = [&c](std::size_t a, std::size_t b) {
      return c[a] > c[b] || (c[a] == c[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                     order.end(), before);
    for (std::size_t k = 0; k < keep; ++k) m[order[k]] = 1.0;
  }
  return mask;
}

ParamVector Sparsify(const ParamVector& update, const UpdateMask& mask) {
  update.RequireSameLayout(mask.bits, "sparsify");
  return Hadamard(update, mask.bits);
}

}  // namespace dpfl
