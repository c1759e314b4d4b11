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

#ifndef DPFL_CONFIG_H_
#define DPFL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpfl/blur.h"
#include "dpfl/data.h"
#include "dpfl/dp_mechanism.h"
#include "dpfl/federation.h"
#include "dpfl/lus.h"
#include "dpfl/nn.h"

namespace dpfl {

enum class DataSourceKind { kSynthetic, kCsv };

struct DataSourceConfig {
  DataSourceKind kind = DataSourceKind::kSynthetic;
  // kSynthetic. synthetic.seed is ignored in favour of data_seed.
  SyntheticSpec synthetic;
  // kCsv. Without test_path the holdout comes from test_fraction.
  std::string path;
  std::string test_path;
  double test_fraction = 0.2;

  bool operator==(const DataSourceConfig&) const = default;
};

struct ModelConfig {
  std::vector<std::size_t> hidden = {32};
  Activation activation = Activation::kRelu;
  LossKind loss = LossKind::kSoftmaxCrossEntropy;

  bool operator==(const ModelConfig&) const = default;
};

// Everything needed to reproduce one run. `seed` drives all random streams;
// the data and partition streams may be pinned separately.
struct ExperimentConfig {
  std::string name = "run";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;
  std::optional<std::uint64_t> partition_seed;
  std::string output_dir = "runs/run";
  DataSourceConfig data;
  PartitionSpec partition;
  ModelConfig model;
  TrainConfig train;
  DpConfig dp;
  // Unset means 1/N (or 1e-5 for a single agent).
  std::optional<double> delta;
  BlurConfig blur{0.4};
  SparsityConfig sparsity{0.7};

  std::uint64_t EffectiveDataSeed() const { return data_seed.value_or(seed); }
  std::uint64_t EffectivePartitionSeed() const {
    return partition_seed.value_or(seed);
  }
  double EffectiveDelta() const;
  // Copies seed, delta and lambda/sparsity into the federation config.
  FederationConfig Federation() const;
  // Model shape for the given data geometry.
  MlpSpec ModelSpec(std::size_t input_dim, int num_classes) const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates. Unknown keys and type mismatches throw ConfigError
// with the dotted field path, e.g. "train.local_lr: expected a number".
ExperimentConfig ParseConfig(const nlohmann::json& j);
ExperimentConfig LoadConfigFile(const std::filesystem::path& path);

// Cross-field checks (lambda * local_lr < 1, p in (0, 1], sparsity in [0, 1),
// exactly one of sigma / epsilon, ...). Throws ConfigError.
void ValidateConfig(const ExperimentConfig& cfg);

// Full serialization with every field explicit. An infinite clip threshold is
// written as the string "inf".
nlohmann::json ToJson(const ExperimentConfig& cfg);

// Assigns a value by axis name. Accepts the short names lambda, sparsity,
// clip, sigma, epsilon, sample_prob, alpha, local_steps, local_lr, rounds,
// seed, or a dotted JSON path such as "train.batch_size".
ExperimentConfig WithOverride(const ExperimentConfig& cfg, const std::string& axis,
                              const nlohmann::json& value);

// 64-bit FNV-1a of the canonical JSON dump, hex encoded. output_dir and name
// are excluded so that relocating a run does not change its identity.
std::string ConfigHash(const ExperimentConfig& cfg);

}  // namespace dpfl

#endif  // DPFL_CONFIG_H_
