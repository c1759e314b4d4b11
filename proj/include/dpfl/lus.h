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

#ifndef DPFL_LUS_H_
#define DPFL_LUS_H_

#include <cstddef>

#include "dpfl/param_vector.h"

namespace dpfl {

// Local update sparsification. `sparsity` is the fraction of update values
// zeroed per layer.
struct SparsityConfig {
  double sparsity = 0.0;

  bool operator==(const SparsityConfig&) const = default;

  // 0 <= sparsity < 1.
  void Validate() const;
};

// Number of values kept in a layer of `layer_dim` values:
// max(1, ceil((1 - sparsity) * layer_dim)). The product is nudged down by a
// few ulps first so that e.g. 0.3 * 10 keeps 3 rather than 4.
std::size_t KeepCount(std::size_t layer_dim, double sparsity);

// 0/1 mask sharing the layout of the update it was built for.
struct UpdateMask {
  ParamVector bits;

  std::size_t LayerPopcount(std::size_t layer) const;
  std::size_t Popcount() const;
  static UpdateMask Ones(const ParamVector& like);
};

// First-order utility cost of zeroing each update value: |grad (*) update|.
ParamVector UtilityCost(const ParamVector& grad, const ParamVector& update);

// Per layer, keeps the KeepCount() values with the largest cost; equal costs
// are ranked by lower flat index. Throws DataError on non-finite costs.
UpdateMask BuildMask(const ParamVector& costs, const SparsityConfig& cfg);

// mask (*) update.
ParamVector Sparsify(const ParamVector& update, const UpdateMask& mask);

}  // namespace dpfl

#endif  // DPFL_LUS_H_
