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

#ifndef DPFL_DP_MECHANISM_H_
#define DPFL_DP_MECHANISM_H_

#include <cstdint>
#include <optional>

#include "dpfl/param_vector.h"
#include "dpfl/rng.h"

namespace dpfl {

// Privacy knobs of one experiment. Exactly one of noise_multiplier and
// target_epsilon is set; the latter is resolved by calibration.
struct DpConfig {
  double clip_threshold = 1.0;
  std::optional<double> noise_multiplier;
  std::optional<double> target_epsilon;
  double sample_prob = 1.0;
  double delta = 1e-5;

  bool operator==(const DpConfig&) const = default;

  // Throws ConfigError naming the first violated field.
  void Validate() const;
};

struct ClipResult {
  ParamVector update;
  // 1 / max(1, ||update|| / S).
  double factor = 1.0;
};

// Rescales `update` onto the l2 ball of radius `clip_threshold`. Inputs whose
// norm is within 1e-12 relative of the ball are returned unchanged, which
// makes the operation exactly idempotent. `clip_threshold` may be +inf.
// Throws DataError on non-finite input and ConfigError for a non-positive
// threshold.
ClipResult Clip(ParamVector update, double clip_threshold);

// update + N(0, S^2 sigma^2 / cohort_size) on every coordinate. sigma == 0
// returns the input untouched (no draws are made).
ParamVector AddGaussianNoise(ParamVector update, double clip_threshold,
                             double noise_multiplier, int cohort_size, Rng& rng);
ParamVector AddGaussianNoise(ParamVector update, double clip_threshold,
                             double noise_multiplier, int cohort_size,
                             std::uint64_t seed);

// Upper bound on E[(1/d) ||noised - raw||^2] for clip-then-noise:
//   (1/d) max(0, ||raw|| - S)^2 + sigma^2 S^2 / cohort_size.
double MseBound(double raw_norm, double clip_threshold, double noise_multiplier,
                int cohort_size, std::size_t dim);

}  // namespace dpfl

#endif  // DPFL_DP_MECHANISM_H_
