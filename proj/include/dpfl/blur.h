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

#ifndef DPFL_BLUR_H_
#define DPFL_BLUR_H_

#include <span>
#include <vector>

#include "dpfl/param_vector.h"

namespace dpfl {

// Bounded local update regularization. The local objective is
//   h(w) = f(w) + (lambda / 2) * max(0, ||w - w_anchor||^2 - S^2)
// where w_anchor is the global model the round started from.
struct BlurConfig {
  double lambda = 0.0;

  bool operator==(const BlurConfig&) const = default;

  // lambda >= 0 and lambda * local_lr < 1.
  void Validate(double local_lr) const;
};

// max(0, ||w - anchor||^2 - S^2).
double BlurPenalty(const ParamVector& w, const ParamVector& anchor,
                   double clip_threshold);

// True when ||w - anchor|| > S. At the boundary the penalty is flat from the
// inside, so the kink counts as inactive.
bool BlurActive(const ParamVector& w, const ParamVector& anchor,
                double clip_threshold);

// Regularizer contribution to the gradient: lambda * (w - anchor) when
// active, zero otherwise. The caller adds the data gradient.
ParamVector BlurGradient(const ParamVector& w, const ParamVector& anchor,
                         double clip_threshold, double lambda);

enum class DiscountReading {
  // gamma_q = (1 - lambda*lr)^q for an active step q (0-based), else 1.
  kStepIndex,
  // gamma_q = (1 - lambda*lr)^(number of active steps after q). This is the
  // coefficient of g_q when the local recursion is unrolled exactly.
  kExactRecursion,
};

// Per-step discount factors given the pre-step distances ||w_q - anchor||.
// Throws ConfigError unless 0 <= lambda * local_lr < 1.
std::vector<double> DiscountTrace(std::span<const double> step_norms,
                                  double clip_threshold, double lambda,
                                  double local_lr,
                                  DiscountReading reading =
                                      DiscountReading::kExactRecursion);

}  // namespace dpfl

#endif  // DPFL_BLUR_H_
