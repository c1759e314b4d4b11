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

// Serial reference vs OpenMP paths for the two hot loops: the per-round
// agent loop and test-set evaluation.

#include <vector>

#include <benchmark/benchmark.h>

#include "dpfl/data.h"
#include "dpfl/federation.h"
#include "dpfl/nn.h"

namespace dpfl {
namespace {

struct Fixture {
  std::vector<AgentShard> shards;
  std::vector<int> cohort;
  std::vector<Sample> test;
  MlpModel model;
  FederationConfig cfg;
};

const Fixture& GetFixture() {
  static const Fixture f = [] {
    Fixture x;
    const Dataset data = GenerateSynthetic({5, 20, 400, 5.0, 1});
    const TrainTestSplit split = SplitHoldout(data, 0.2, 1);
    x.shards = Partition(split.train, {PartitionScheme::kDirichlet, 0.5, 100, 1});
    x.test = split.test.samples;
    for (int i = 0; i < 100; i += 5) x.cohort.push_back(i);
    x.model = MlpModel::Initialize(MlpSpec{{20, 32, 5}}, 1);
    x.cfg.train.local_steps = 30;
    x.cfg.train.batch_size = 16;
    x.cfg.dp.clip_threshold = 0.1;
    x.cfg.dp.noise_multiplier = 1.0;
    x.cfg.blur.lambda = 0.4;
    x.cfg.sparsity.sparsity = 0.7;
    return x;
  }();
  return f;
}

void BM_CohortSerial(benchmark::State& state) {
  const Fixture& f = GetFixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunCohortSerial(f.model, f.shards, f.cohort, f.cfg, 1));
  }
}
BENCHMARK(BM_CohortSerial)->Unit(benchmark::kMillisecond);

void BM_CohortParallel(benchmark::State& state) {
  const Fixture& f = GetFixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunCohortParallel(f.model, f.shards, f.cohort, f.cfg, 1));
  }
}
BENCHMARK(BM_CohortParallel)->Unit(benchmark::kMillisecond);

void BM_EvaluateSerial(benchmark::State& state) {
  const Fixture& f = GetFixture();
  for (auto _ : state) benchmark::DoNotOptimize(Evaluate(f.model, f.test));
}
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMicrosecond);

void BM_EvaluateParallel(benchmark::State& state) {
  const Fixture& f = GetFixture();
  for (auto _ : state) benchmark::DoNotOptimize(EvaluateParallel(f.model, f.test));
}
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace dpfl

BENCHMARK_MAIN();
