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

#ifndef DPFL_FEDERATION_H_
#define DPFL_FEDERATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dpfl/accountant.h"
#include "dpfl/blur.h"
#include "dpfl/data.h"
#include "dpfl/dp_mechanism.h"
#include "dpfl/lus.h"
#include "dpfl/nn.h"
#include "dpfl/param_vector.h"
#include "dpfl/rng.h"

namespace dpfl {

struct TrainConfig {
  double local_lr = 0.1;
  double server_lr = 1.0;
  int local_steps = 30;
  int rounds = 100;
  int batch_size = 32;
  std::uint64_t seed = 0;
  // Run the agents of a round on OpenMP threads. Results are bit-identical
  // to the serial path.
  bool parallel = true;

  bool operator==(const TrainConfig&) const = default;

  void Validate() const;
};

struct FederationConfig {
  TrainConfig train;
  DpConfig dp;
  BlurConfig blur;
  SparsityConfig sparsity;

  void Validate() const;
};

// Poisson cohort: each of the n_agents ids is included independently with
// probability sample_prob. Ids come back in ascending order.
std::vector<int> SampleCohort(int n_agents, double sample_prob, Rng& rng);

struct UpdateTerms {
  double alpha = 1.0;  // min(1, S / ||sparsified||)
  double beta = 1.0;   // ||sparsified|| / ||trained||
  bool zero_update = false;
};

// Clip attenuation and sparsification norm ratio of one agent's update. A
// zero trained update has beta = 1 and sets zero_update.
UpdateTerms UpdateDiagnostics(const ParamVector& trained,
                                  const ParamVector& sparsified,
                                  double clip_threshold);

struct AgentReport {
  int agent_id = 0;
  bool failed = false;
  double mean_step_loss = 0.0;
  double raw_norm = 0.0;      // ||w_Q - w_0||
  double preclip_norm = 0.0;  // norm after sparsification, entering clip
  double clip_factor = 1.0;
  bool clipped = false;
  UpdateTerms terms;
  int active_steps = 0;       // local steps where the BLUR penalty was active
  double min_discount = 1.0;  // smallest exact-recursion discount factor
};

// Intermediate outputs of the local pipeline, captured for inspection.
struct LocalUpdateStages {
  ParamVector trained;     // w_Q - w_0
  ParamVector sparsified;  // mask (*) trained
  ParamVector clipped;
  ParamVector noised;
  std::vector<double> step_losses;
};

struct LocalUpdateResult {
  ParamVector update;  // noised, ready for aggregation; empty when failed
  AgentReport report;
};

// One agent's round: Q steps of (minibatch gradient + BLUR gradient), then
// utility-cost sparsification, clipping and Gaussian noise with variance
// S^2 sigma^2 / cohort_size. cfg.dp.noise_multiplier must be resolved. A
// non-finite loss or update marks the agent failed instead of throwing.
LocalUpdateResult LocalUpdate(const MlpModel& global, const AgentShard& shard,
                              const FederationConfig& cfg, int round,
                              int cohort_size,
                              LocalUpdateStages* stages = nullptr);

// Serial reference and OpenMP version of the per-round agent loop. Both
// return results in cohort order; each agent draws from its own
// (seed, round, agent) streams, so the two agree bit for bit.
std::vector<LocalUpdateResult> RunCohortSerial(const MlpModel& global,
                                               std::span<const AgentShard> shards,
                                               std::span<const int> cohort,
                                               const FederationConfig& cfg,
                                               int round);
std::vector<LocalUpdateResult> RunCohortParallel(
    const MlpModel& global, std::span<const AgentShard> shards,
    std::span<const int> cohort, const FederationConfig& cfg, int round);

// global + server_lr * mean(updates). Summation runs in list order.
ParamVector Aggregate(const ParamVector& global,
                      std::span<const ParamVector> updates, double server_lr);

struct RoundMetrics {
  int round = 0;
  int cohort_size = 0;
  bool skipped = false;
  int failed_agents = 0;
  std::vector<double> preclip_norms;
  std::vector<double> raw_norms;
  double clip_fraction = 0.0;
  double alpha_bar = 1.0;
  double mean_beta = 1.0;
  double train_loss = 0.0;  // NaN when no agent trained
  double test_loss = 0.0;   // NaN without a test set
  double test_accuracy = 0.0;
  double epsilon = 0.0;     // cumulative; +inf when sigma == 0
};

struct ExperimentResult {
  MlpModel model;
  std::vector<RoundMetrics> metrics;
  PrivacyLedger ledger;
  double noise_multiplier = 0.0;
  std::vector<std::string> events;
};

// Noise multiplier to use for `rounds` rounds: the configured value, or the
// calibrated one when only a target epsilon is given.
double ResolveNoiseMultiplier(const DpConfig& dp, int rounds);

using RoundCallback = std::function<void(const RoundMetrics&)>;

// The server loop. Validates everything before round 1, then runs
// cfg.train.rounds rounds of cohort sampling, local updates, aggregation and
// test evaluation. Empty cohorts skip the round without privacy spend.
ExperimentResult RunExperiment(const MlpSpec& model_spec,
                               const FederationConfig& cfg,
                               std::span<const AgentShard> shards,
                               std::span<const Sample> test_set,
                               const RoundCallback& on_round = {});

}  // namespace dpfl

#endif  // DPFL_FEDERATION_H_
