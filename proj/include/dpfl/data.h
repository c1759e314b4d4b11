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

#ifndef DPFL_DATA_H_
#define DPFL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dpfl/nn.h"

namespace dpfl {

struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;
  std::size_t dim = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// One agent's local data.
struct AgentShard {
  int agent_id = 0;
  std::vector<Sample> samples;

  std::size_t n() const { return samples.size(); }
};

// Gaussian class blobs with unit per-coordinate noise. When dim >= classes
// the centroids sit on scaled coordinate axes so that every pair of
// centroids is exactly `separation` apart; otherwise the centroids are
// random directions of the same radius drawn from `seed`.
struct SyntheticSpec {
  int classes = 5;
  std::size_t dim = 20;
  std::size_t per_class = 200;
  double separation = 3.0;
  std::uint64_t seed = 0;

  bool operator==(const SyntheticSpec&) const = default;
};

Dataset GenerateSynthetic(const SyntheticSpec& spec);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Seeded shuffle, then the last `test_fraction` of samples become the test
// set.
TrainTestSplit SplitHoldout(const Dataset& data, double test_fraction,
                            std::uint64_t seed);

enum class PartitionScheme { kDirichlet, kIid, kByLabel };

std::string ToString(PartitionScheme s);
PartitionScheme ParsePartitionScheme(const std::string& s);

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::kDirichlet;
  double alpha = 0.5;
  int agents = 100;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const PartitionSpec&) const = default;
};

// Splits `data` across spec.agents shards.
//   dirichlet  per class, proportions ~ Dir(alpha * 1_N); each sample of the
//              class goes to an agent drawn from those proportions. Agents
//              left empty then take one random sample from a random shard
//              holding at least two.
//   iid        seeded shuffle dealt round-robin.
//   by_label   samples sorted by label, cut into N contiguous chunks.
// Every sample lands in exactly one shard. Throws ConfigError when there are
// more agents than samples.
std::vector<AgentShard> Partition(const Dataset& data, const PartitionSpec& spec);

// Per-agent label histogram normalized to a distribution.
std::vector<double> LabelDistribution(const std::vector<Sample>& samples,
                                      int num_classes);

// Mean total-variation distance between each shard's label distribution and
// the pooled one.
double MeanLabelSkew(const std::vector<AgentShard>& shards, int num_classes);

struct CsvSchema {
  // Expected feature count; 0 infers it from the first data row.
  std::size_t feature_dim = 0;
};

// UTF-8 comma-separated rows: features..., integer label. A first line that
// does not parse as numbers is treated as a header. Throws ParseError with
// the offending 1-based line number, DataError for an empty dataset.
Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema = {});

}  // namespace dpfl

#endif  // DPFL_DATA_H_
