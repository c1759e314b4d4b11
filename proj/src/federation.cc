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

#include "dpfl/federation.h"

#include <cmath>
#include <exception>
#include <limits>
#include <utility>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LocalUpdateResult Failed(int agent_id) {
  LocalUpdateResult r;
  r.report.agent_id = agent_id;
  r.report.failed = true;
  return r;
}

double DistanceTo(const ParamVector& w, const ParamVector& anchor) {
  double sq = 0.0;
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const double u = w[i] - anchor[i];
    sq += u * u;
  }
  return std::sqrt(sq);
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(local_lr > 0.0 && std::isfinite(local_lr))) {
    throw ConfigError("train.local_lr must be finite and > 0");
  }
  if (!(server_lr > 0.0 && std::isfinite(server_lr))) {
    throw ConfigError("train.server_lr must be finite and > 0");
  }
  if (local_steps < 1) throw ConfigError("train.local_steps must be >= 1");
  if (rounds < 0) throw ConfigError("train.rounds must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
}

void FederationConfig::Validate() const {
  train.Validate();
  dp.Validate();
  blur.Validate(train.local_lr);
  sparsity.Validate();
}

std::vector<int> SampleCohort(int n_agents, double sample_prob, Rng& rng) {
  if (!(sample_prob > 0.0 && sample_prob <= 1.0)) {
    throw ConfigError("sample probability must lie in (0, 1]");
  }
  std::vector<int> cohort;
  for (int i = 0; i < n_agents; ++i) {
    if (rng.Bernoulli(sample_prob)) cohort.push_back(i);
  }
  return cohort;
}

UpdateTerms UpdateDiagnostics(const ParamVector& trained,
                                  const ParamVector& sparsified,
                                  double clip_threshold) {
  UpdateTerms t;
  const double raw = trained.Norm();
  const double kept = sparsified.Norm();
  if (raw > 0.0) {
    t.beta = std::min(1.0, kept / raw);
  } else {
    t.zero_update = true;
  }
  t.alpha = kept > clip_threshold ? clip_threshold / kept : 1.0;
  return t;
}

LocalUpdateResult LocalUpdate(const MlpModel& global, const AgentShard& shard,
                              const FederationConfig& cfg, int round,
                              int cohort_size, LocalUpdateStages* stages) {
  if (shard.samples.empty()) {
    throw ConfigError("agent " + std::to_string(shard.agent_id) +
                      " has no samples");
  }
  if (!cfg.dp.noise_multiplier.has_value()) {
    throw ConfigError("local update needs a resolved noise multiplier");
  }
  cfg.blur.Validate(cfg.train.local_lr);
  const TrainConfig& train = cfg.train;
  const double clip = cfg.dp.clip_threshold;
  const double lambda = cfg.blur.lambda;
  const auto agent = static_cast<std::uint64_t>(shard.agent_id);
  const auto round_key = static_cast<std::uint64_t>(round);

  MlpModel local = global;
  const ParamVector& anchor = global.params;
  Rng batch_rng(train.seed, StreamTag::kBatch, round_key, agent);
  std::vector<const Sample*> batch(static_cast<std::size_t>(train.batch_size));
  std::vector<double> step_norms;
  std::vector<double> step_losses;
  step_norms.reserve(static_cast<std::size_t>(train.local_steps));
  step_losses.reserve(static_cast<std::size_t>(train.local_steps));

  for (int q = 0; q < train.local_steps; ++q) {
    for (const Sample*& s : batch) {
      s = &shard.samples[batch_rng.UniformIndex(shard.samples.size())];
    }
    LossAndGradient lg = LossGradient(local, batch);
    if (!std::isfinite(lg.loss) || !lg.gradient.AllFinite()) {
      return Failed(shard.agent_id);
    }
    step_losses.push_back(lg.loss);
    if (lambda > 0.0) {
      step_norms.push_back(DistanceTo(local.params, anchor));
      lg.gradient += BlurGradient(local.params, anchor, clip, lambda);
    }
    local.params.Axpy(-train.local_lr, lg.gradient);
  }
  if (!local.params.AllFinite()) return Failed(shard.agent_id);

  LocalUpdateResult result;
  AgentReport& report = result.report;
  report.agent_id = shard.agent_id;
  double loss_sum = 0.0;
  for (double l : step_losses) loss_sum += l;
  report.mean_step_loss = loss_sum / static_cast<double>(step_losses.size());
  if (lambda > 0.0) {
    const std::vector<double> gamma = DiscountTrace(
        step_norms, clip, lambda, train.local_lr, DiscountReading::kExactRecursion);
    for (double n : step_norms) report.active_steps += n > clip ? 1 : 0;
    report.min_discount = gamma.front();
  }

  ParamVector trained = local.params - anchor;
  ParamVector sparsified;
  if (cfg.sparsity.sparsity > 0.0) {
    const ParamVector grad = LossGradient(local, shard.samples).gradient;
    if (!grad.AllFinite()) return Failed(shard.agent_id);
    const UpdateMask mask = BuildMask(UtilityCost(grad, trained), cfg.sparsity);
    sparsified = Sparsify(trained, mask);
  } else {
    sparsified = trained;
  }
  report.raw_norm = trained.Norm();
  report.preclip_norm = sparsified.Norm();
  report.terms = UpdateDiagnostics(trained, sparsified, clip);

  ClipResult clipped = Clip(sparsified, clip);
  report.clip_factor = clipped.factor;
  report.clipped = clipped.factor < 1.0;

  Rng noise_rng(train.seed, StreamTag::kNoise, round_key, agent);
  ParamVector noised = AddGaussianNoise(clipped.update, clip,
                                        *cfg.dp.noise_multiplier, cohort_size,
                                        noise_rng);
  if (stages != nullptr) {
    stages->trained = std::move(trained);
    stages->sparsified = std::move(sparsified);
    stages->clipped = clipped.update;
    stages->noised = noised;
    stages->step_losses = step_losses;
  }
  result.update = std::move(noised);
  return result;
}

std::vector<LocalUpdateResult> RunCohortSerial(const MlpModel& global,
                                               std::span<const AgentShard> shards,
                                               std::span<const int> cohort,
                                               const FederationConfig& cfg,
                                               int round) {
  std::vector<LocalUpdateResult> results;
  results.reserve(cohort.size());
  const int cohort_size = static_cast<int>(cohort.size());
  for (int id : cohort) {
    results.push_back(LocalUpdate(global, shards[static_cast<std::size_t>(id)],
                                  cfg, round, cohort_size));
  }
  return results;
}

std::vector<LocalUpdateResult> RunCohortParallel(
    const MlpModel& global, std::span<const AgentShard> shards,
    std::span<const int> cohort, const FederationConfig& cfg, int round) {
  const auto n = static_cast<std::int64_t>(cohort.size());
  const int cohort_size = static_cast<int>(cohort.size());
  std::vector<LocalUpdateResult> results(cohort.size());
  std::vector<std::exception_ptr> errors(cohort.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const auto id = static_cast<std::size_t>(cohort[static_cast<std::size_t>(i)]);
      results[static_cast<std::size_t>(i)] =
          LocalUpdate(global, shards[id], cfg, round, cohort_size);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

ParamVector Aggregate(const ParamVector& global,
                      std::span<const ParamVector> updates, double server_lr) {
  if (updates.empty()) throw ConfigError("aggregate: no updates");
  ParamVector sum = ParamVector::ZerosLike(global);
  for (const ParamVector& u : updates) sum += u;
  sum *= 1.0 / static_cast<double>(updates.size());
  ParamVector out = global;
  out.Axpy(server_lr, sum);
  return out;
}

double ResolveNoiseMultiplier(const DpConfig& dp, int rounds) {
  dp.Validate();
  if (dp.noise_multiplier.has_value()) return *dp.noise_multiplier;
  return CalibrateSigma(*dp.target_epsilon, dp.delta, std::max(rounds, 1),
                        dp.sample_prob)
      .sigma;
}

ExperimentResult RunExperiment(const MlpSpec& model_spec,
                               const FederationConfig& cfg_in,
                               std::span<const AgentShard> shards,
                               std::span<const Sample> test_set,
                               const RoundCallback& on_round) {
  cfg_in.Validate();
  model_spec.Validate();
  if (shards.empty()) throw ConfigError("experiment needs at least one agent");
  for (const AgentShard& shard : shards) {
    if (shard.samples.empty()) {
      throw ConfigError("agent " + std::to_string(shard.agent_id) +
                        " has an empty shard");
    }
    for (const Sample& s : shard.samples) {
      if (s.features.size() != model_spec.input_dim()) {
        throw ConfigError("agent " + std::to_string(shard.agent_id) +
                          ": feature length does not match model input");
      }
    }
  }
  for (const Sample& s : test_set) {
    if (s.features.size() != model_spec.input_dim()) {
      throw ConfigError("test set feature length does not match model input");
    }
  }
  for (std::size_t i = 0; i < shards.size(); ++i) {
    if (shards[i].agent_id != static_cast<int>(i)) {
      throw ConfigError("shard agent ids must equal their positions");
    }
  }

  FederationConfig cfg = cfg_in;
  const double sigma = ResolveNoiseMultiplier(cfg.dp, cfg.train.rounds);
  cfg.dp.noise_multiplier = sigma;
  cfg.dp.target_epsilon.reset();

  ExperimentResult result{MlpModel::Initialize(model_spec, cfg.train.seed),
                          {},
                          PrivacyLedger(cfg.dp.delta),
                          sigma,
                          {}};
  const int n_agents = static_cast<int>(shards.size());

  for (int t = 1; t <= cfg.train.rounds; ++t) {
    RoundMetrics m;
    m.round = t;
    Rng cohort_rng(cfg.train.seed, StreamTag::kCohort, static_cast<std::uint64_t>(t), 0);
    const std::vector<int> cohort =
        SampleCohort(n_agents, cfg.dp.sample_prob, cohort_rng);
    m.cohort_size = static_cast<int>(cohort.size());
    m.train_loss = kNaN;

    if (cohort.empty()) {
      m.skipped = true;
      result.events.push_back("round " + std::to_string(t) +
                              ": empty cohort, round skipped");
    } else {
      const std::vector<LocalUpdateResult> locals =
          cfg.train.parallel
              ? RunCohortParallel(result.model, shards, cohort, cfg, t)
              : RunCohortSerial(result.model, shards, cohort, cfg, t);
      std::vector<ParamVector> updates;
      double loss_sum = 0.0;
      double alpha_sum = 0.0;
      double beta_sum = 0.0;
      int clipped = 0;
      for (const LocalUpdateResult& r : locals) {
        if (r.report.failed) {
          ++m.failed_agents;
          result.events.push_back("round " + std::to_string(t) + ": agent " +
                                  std::to_string(r.report.agent_id) +
                                  " diverged, excluded from aggregate");
          continue;
        }
        if (r.report.terms.zero_update) {
          result.events.push_back("round " + std::to_string(t) + ": agent " +
                                  std::to_string(r.report.agent_id) +
                                  " produced a zero update, beta set to 1");
        }
        updates.push_back(r.update);
        m.preclip_norms.push_back(r.report.preclip_norm);
        m.raw_norms.push_back(r.report.raw_norm);
        loss_sum += r.report.mean_step_loss;
        alpha_sum += r.report.terms.alpha;
        beta_sum += r.report.terms.beta;
        clipped += r.report.clipped ? 1 : 0;
      }
      if (!updates.empty()) {
        const double k = static_cast<double>(updates.size());
        result.model.params =
            Aggregate(result.model.params, updates, cfg.train.server_lr);
        m.train_loss = loss_sum / k;
        m.alpha_bar = alpha_sum / k;
        m.mean_beta = beta_sum / k;
        m.clip_fraction = static_cast<double>(clipped) / k;
      }
      result.ledger.AddRounds(cfg.dp.sample_prob, sigma);
    }

    if (test_set.empty()) {
      m.test_loss = kNaN;
      m.test_accuracy = kNaN;
    } else {
      const EvalResult eval = cfg.train.parallel
                                  ? EvaluateParallel(result.model, test_set)
                                  : Evaluate(result.model, test_set);
      m.test_loss = eval.loss;
      m.test_accuracy = eval.accuracy;
    }
    m.epsilon = result.ledger.empty() ? 0.0 : ComposeAndConvert(result.ledger);
    if (on_round) on_round(m);
    result.metrics.push_back(std::move(m));
  }
  return result;
}

}  // namespace dpfl
