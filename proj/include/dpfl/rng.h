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

#ifndef DPFL_RNG_H_
#define DPFL_RNG_H_

#include <cstdint>
#include <random>

namespace dpfl {

// Purpose tags that keep the random streams of one (round, agent) pair apart.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kCohort = 2,
  kBatch = 3,
  kNoise = 4,
  kData = 5,
  kPartition = 6,
};

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Derives an independent 64-bit seed for a (seed, tag, round, agent) stream.
// The derivation is pure, so parallel scheduling cannot change which stream
// an agent sees.
std::uint64_t DeriveSeed(std::uint64_t seed, StreamTag tag, std::uint64_t round,
                         std::uint64_t agent);

// Seedable generator with platform-independent variates.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard library distributions are not, so all variates are
// produced here:
//   Uniform01    53 high bits of one engine draw, scaled to [0, 1).
//   Normal       Marsaglia polar method; the second variate is cached.
//   Gamma        Marsaglia-Tsang squeeze, with the U^(1/a) boost for a < 1.
//   UniformIndex Lemire-style rejection on the 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t round,
      std::uint64_t agent)
      : engine_(DeriveSeed(seed, tag, round, agent)) {}

  std::uint64_t NextU64() { return engine_(); }
  double Uniform01();
  // Uniform in (0, 1]; safe as a log() argument.
  double UniformOpen0();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Gamma(shape, 1). shape must be positive.
  double Gamma(double shape);
  bool Bernoulli(double p) { return Uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpfl

#endif  // DPFL_RNG_H_
