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

#include "dpfl/blur.h"

#include <cmath>
#include <string>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

void CheckDiscount(double lambda, double local_lr) {
  if (!(lambda >= 0.0)) throw ConfigError("blur.lambda must be >= 0");
  if (!(local_lr > 0.0)) throw ConfigError("train.local_lr must be > 0");
  if (!(lambda * local_lr < 1.0)) {
    throw ConfigError("blur: lambda * local_lr must be < 1 (got " +
                      std::to_string(lambda * local_lr) + ")");
  }
}

}  // namespace

void BlurConfig::Validate(double local_lr) const {
  CheckDiscount(lambda, local_lr);
}

double BlurPenalty(const ParamVector& w, const ParamVector& anchor,
                   double clip_threshold) {
  w.RequireSameLayout(anchor, "blur penalty");
  double sq = 0.0;
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const double u = w[i] - anchor[i];
    sq += u * u;
  }
  return std::max(0.0, sq - clip_threshold * clip_threshold);
}

bool BlurActive(const ParamVector& w, const ParamVector& anchor,
                double clip_threshold) {
  return BlurPenalty(w, anchor, clip_threshold) > 0.0;
}

ParamVector BlurGradient(const ParamVector& w, const ParamVector& anchor,
                         double clip_threshold, double lambda) {
  ParamVector grad = ParamVector::ZerosLike(w);
  if (lambda == 0.0 || !BlurActive(w, anchor, clip_threshold)) return grad;
  for (std::size_t i = 0; i < w.dim(); ++i) grad[i] = lambda * (w[i] - anchor[i]);
  return grad;
}

std::vector<double> DiscountTrace(std::span<const double> step_norms,
                                  double clip_threshold, double lambda,
                                  double local_lr, DiscountReading reading) {
  CheckDiscount(lambda, local_lr);
  const double base = 1.0 - lambda * local_lr;
  const std::size_t n = step_norms.size();
  std::vector<double> gamma(n, 1.0);
  if (reading == DiscountReading::kStepIndex) {
    for (std::size_t q = 0; q < n; ++q) {
      if (step_norms[q] > clip_threshold) {
        gamma[q] = std::pow(base, static_cast<double>(q));
      }
    }
    return gamma;
  }
  // Walk backwards accumulating the product of later contraction factors.
  double tail = 1.0;
  for (std::size_t q = n; q-- > 0;) {
    gamma[q] = tail;
    if (step_norms[q] > clip_threshold) tail *= base;
  }
  return gamma;
}

}  // namespace dpfl
