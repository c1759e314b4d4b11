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

#include "dpfl/dp_mechanism.h"

#include <cmath>
#include <string>
#include <utility>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

constexpr double kClipSlack = 1e-12;

void RequireThreshold(double s) {
  if (!(s > 0.0)) {
    throw ConfigError("clip threshold must be positive, got " +
                      std::to_string(s));
  }
}

}  // namespace

void DpConfig::Validate() const {
  RequireThreshold(clip_threshold);
  if (noise_multiplier.has_value() == target_epsilon.has_value()) {
    throw ConfigError(
        "dp: exactly one of noise_multiplier and target_epsilon must be set");
  }
  if (noise_multiplier.has_value() &&
      !(*noise_multiplier >= 0.0 && std::isfinite(*noise_multiplier))) {
    throw ConfigError("dp.noise_multiplier must be finite and >= 0");
  }
  if (target_epsilon.has_value() &&
      !(*target_epsilon > 0.0 && std::isfinite(*target_epsilon))) {
    throw ConfigError("dp.target_epsilon must be finite and > 0");
  }
  if (!(sample_prob > 0.0 && sample_prob <= 1.0)) {
    throw ConfigError("dp.sample_prob must lie in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("dp.delta must lie in (0, 1)");
  }
}

ClipResult Clip(ParamVector update, double clip_threshold) {
  RequireThreshold(clip_threshold);
  if (!update.AllFinite()) throw DataError("clip: update has non-finite values");
  const double norm = update.Norm();
  if (norm <= clip_threshold * (1.0 + kClipSlack)) {
    return {std::move(update), 1.0};
  }
  const double factor = clip_threshold / norm;
  update *= factor;
  return {std::move(update), factor};
}

ParamVector AddGaussianNoise(ParamVector update, double clip_threshold,
                             double noise_multiplier, int cohort_size,
                             Rng& rng) {
  if (!(noise_multiplier >= 0.0)) {
    throw ConfigError("noise multiplier must be >= 0");
  }
  if (cohort_size < 1) throw ConfigError("cohort size must be >= 1");
  if (noise_multiplier == 0.0) return update;
  RequireThreshold(clip_threshold);
  const double stddev = clip_threshold * noise_multiplier /
                        std::sqrt(static_cast<double>(cohort_size));
  if (!std::isfinite(stddev)) {
    throw ConfigError("noise stddev is not finite (infinite clip threshold?)");
  }
  for (double& v : update.values()) v += stddev * rng.Normal();
  return update;
}

ParamVector AddGaussianNoise(ParamVector update, double clip_threshold,
                             double noise_multiplier, int cohort_size,
                             std::uint64_t seed) {
  Rng rng(seed);
  return AddGaussianNoise(std::move(update), clip_threshold, noise_multiplier,
                          cohort_size, rng);
}

double MseBound(double raw_norm, double clip_threshold, double noise_multiplier,
                int cohort_size, std::size_t dim) {
  if (dim < 1 || cohort_size < 1 || !(clip_threshold > 0.0) ||
      !(noise_multiplier >= 0.0) || !(raw_norm >= 0.0)) {
    throw ConfigError("mse bound: invalid arguments");
  }
  const double excess = std::max(0.0, raw_norm - clip_threshold);
  const double clip_term = excess * excess / static_cast<double>(dim);
  if (noise_multiplier == 0.0) return clip_term;
  const double noise_term = noise_multiplier * noise_multiplier *
                            clip_threshold * clip_threshold /
                            static_cast<double>(cohort_size);
  return clip_term + noise_term;
}

}  // namespace dpfl
