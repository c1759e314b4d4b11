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

#include "dpfl/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>

#include "dpfl/errors.h"
#include "dpfl/rng.h"

namespace dpfl {
namespace {

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.UniformIndex(i);
    std::swap(v[i - 1], v[j]);
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool ParseDouble(std::string_view s, double* out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw ConfigError("synthetic data needs >= 2 classes");
  if (spec.dim < 1) throw ConfigError("synthetic data needs dim >= 1");
  if (!(spec.separation >= 0.0)) throw ConfigError("separation must be >= 0");
  const auto k = static_cast<std::size_t>(spec.classes);
  const double radius = spec.separation / std::sqrt(2.0);

  Rng centroid_rng(spec.seed, StreamTag::kData, 0, 0);
  std::vector<std::vector<double>> centroids(k, std::vector<double>(spec.dim, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    if (spec.dim >= k) {
      centroids[c][c] = radius;
      continue;
    }
    double norm = 0.0;
    for (double& v : centroids[c]) {
      v = centroid_rng.Normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : centroids[c]) v *= norm > 0.0 ? radius / norm : 0.0;
  }

  Dataset data;
  data.num_classes = spec.classes;
  data.dim = spec.dim;
  data.samples.reserve(k * spec.per_class);
  Rng rng(spec.seed, StreamTag::kData, 1, 0);
  for (std::size_t i = 0; i < spec.per_class; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      Sample s;
      s.label = static_cast<int>(c);
      s.features.resize(spec.dim);
      for (std::size_t j = 0; j < spec.dim; ++j) {
        s.features[j] = centroids[c][j] + rng.Normal();
      }
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

TrainTestSplit SplitHoldout(const Dataset& data, double test_fraction,
                            std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in [0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, StreamTag::kData, 2, 0);
  Shuffle(order, rng);
  const auto n_test = static_cast<std::size_t>(
      std::floor(test_fraction * static_cast<double>(data.size())));
  TrainTestSplit split;
  split.train.num_classes = split.test.num_classes = data.num_classes;
  split.train.dim = split.test.dim = data.dim;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Dataset& dst = i + n_test < order.size() ? split.train : split.test;
    dst.samples.push_back(data.samples[order[i]]);
  }
  return split;
}

std::string ToString(PartitionScheme s) {
  switch (s) {
    case PartitionScheme::kDirichlet:
      return "dirichlet";
    case PartitionScheme::kIid:
      return "iid";
    case PartitionScheme::kByLabel:
      return "by_label";
  }
  return "unknown";
}

PartitionScheme ParsePartitionScheme(const std::string& s) {
  if (s == "dirichlet") return PartitionScheme::kDirichlet;
  if (s == "iid") return PartitionScheme::kIid;
  if (s == "by_label") return PartitionScheme::kByLabel;
  throw ConfigError("unknown partition scheme '" + s +
                    "' (expected dirichlet|iid|by_label)");
}

void PartitionSpec::Validate() const {
  if (agents < 1) throw ConfigError("partition.agents must be >= 1");
  if (scheme == PartitionScheme::kDirichlet &&
      !(alpha > 0.0 && std::isfinite(alpha))) {
    throw ConfigError("partition.alpha must be finite and > 0");
  }
}

std::vector<AgentShard> Partition(const Dataset& data, const PartitionSpec& spec) {
  spec.Validate();
  if (data.empty()) throw DataError("cannot partition an empty dataset");
  const auto n_agents = static_cast<std::size_t>(spec.agents);
  if (n_agents > data.size()) {
    throw ConfigError("partition: " + std::to_string(n_agents) +
                      " agents exceed dataset size " +
                      std::to_string(data.size()));
  }
  Rng rng(spec.seed, StreamTag::kPartition, 0, 0);
  std::vector<std::vector<std::size_t>> assigned(n_agents);

  switch (spec.scheme) {
    case PartitionScheme::kIid: {
      std::vector<std::size_t> order(data.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Shuffle(order, rng);
      for (std::size_t i = 0; i < order.size(); ++i) {
        assigned[i % n_agents].push_back(order[i]);
      }
      break;
    }
    case PartitionScheme::kByLabel: {
      std::vector<std::size_t> order(data.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.samples[a].label < data.samples[b].label;
      });
      for (std::size_t i = 0; i < order.size(); ++i) {
        assigned[i * n_agents / order.size()].push_back(order[i]);
      }
      break;
    }
    case PartitionScheme::kDirichlet: {
      int max_label = 0;
      for (const Sample& s : data.samples) max_label = std::max(max_label, s.label);
      std::vector<std::vector<std::size_t>> by_class(
          static_cast<std::size_t>(max_label) + 1);
      for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[static_cast<std::size_t>(data.samples[i].label)].push_back(i);
      }
      std::vector<double> cdf(n_agents);
      for (auto& members : by_class) {
        if (members.empty()) continue;
        Shuffle(members, rng);
        double total = 0.0;
        for (std::size_t a = 0; a < n_agents; ++a) {
          total += rng.Gamma(spec.alpha);
          cdf[a] = total;
        }
        if (!(total > 0.0)) {
          // Every gamma draw underflowed; the mass collapses onto one agent.
          std::fill(cdf.begin(), cdf.end(), 0.0);
          const std::size_t winner = rng.UniformIndex(n_agents);
          std::fill(cdf.begin() + static_cast<std::ptrdiff_t>(winner), cdf.end(), 1.0);
          total = 1.0;
        }
        for (std::size_t idx : members) {
          const double u = rng.Uniform01() * total;
          auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
          if (it == cdf.end()) --it;
          assigned[static_cast<std::size_t>(it - cdf.begin())].push_back(idx);
        }
      }
      for (std::size_t a = 0; a < n_agents; ++a) {
        if (!assigned[a].empty()) continue;
        std::vector<std::size_t> donors;
        for (std::size_t b = 0; b < n_agents; ++b) {
          if (assigned[b].size() >= 2) donors.push_back(b);
        }
        auto& donor = assigned[donors[rng.UniformIndex(donors.size())]];
        const std::size_t pick = rng.UniformIndex(donor.size());
        assigned[a].push_back(donor[pick]);
        donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      break;
    }
  }

  std::vector<AgentShard> shards(n_agents);
  for (std::size_t a = 0; a < n_agents; ++a) {
    shards[a].agent_id = static_cast<int>(a);
    std::sort(assigned[a].begin(), assigned[a].end());
    shards[a].samples.reserve(assigned[a].size());
    for (std::size_t idx : assigned[a]) shards[a].samples.push_back(data.samples[idx]);
  }
  return shards;
}

std::vector<double> LabelDistribution(const std::vector<Sample>& samples,
                                      int num_classes) {
  std::vector<double> hist(static_cast<std::size_t>(num_classes), 0.0);
  for (const Sample& s : samples) {
    if (s.label >= 0 && s.label < num_classes) {
      hist[static_cast<std::size_t>(s.label)] += 1.0;
    }
  }
  if (!samples.empty()) {
    for (double& h : hist) h /= static_cast<double>(samples.size());
  }
  return hist;
}

double MeanLabelSkew(const std::vector<AgentShard>& shards, int num_classes) {
  if (shards.empty()) return 0.0;
  std::vector<double> global(static_cast<std::size_t>(num_classes), 0.0);
  double total = 0.0;
  for (const AgentShard& shard : shards) {
    for (const Sample& s : shard.samples) {
      if (s.label >= 0 && s.label < num_classes) {
        global[static_cast<std::size_t>(s.label)] += 1.0;
      }
    }
    total += static_cast<double>(shard.n());
  }
  for (double& g : global) g /= total;
  double sum_tv = 0.0;
  for (const AgentShard& shard : shards) {
    const std::vector<double> local = LabelDistribution(shard.samples, num_classes);
    double tv = 0.0;
    for (std::size_t k = 0; k < global.size(); ++k) tv += std::fabs(local[k] - global[k]);
    sum_tv += 0.5 * tv;
  }
  return sum_tv / static_cast<double>(shards.size());
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file " + path.string(), 0);
  Dataset data;
  data.dim = schema.feature_dim;
  std::string line;
  int line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (line_no == 1 && view.size() >= 3 &&
        static_cast<unsigned char>(view[0]) == 0xEF &&
        static_cast<unsigned char>(view[1]) == 0xBB &&
        static_cast<unsigned char>(view[2]) == 0xBF) {
      view.remove_prefix(3);
    }
    if (view.empty()) continue;
    const std::vector<std::string_view> fields = SplitFields(view);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) {
      numeric = ParseDouble(fields[i], &values[i]);
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": row is not numeric",
                       line_no);
    }
    if (fields.size() < 2) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": need at least one feature and a label",
                       line_no);
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": non-finite value in row",
                         line_no);
      }
    }
    const double label = values.back();
    if (label != std::floor(label) || label < 0.0 || label > 1e9) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": label must be a non-negative integer",
                       line_no);
    }
    values.pop_back();
    if (data.dim == 0) data.dim = values.size();
    if (values.size() != data.dim) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(data.dim) + " features, found " +
                           std::to_string(values.size()),
                       line_no);
    }
    Sample s;
    s.features = std::move(values);
    s.label = static_cast<int>(label);
    max_label = std::max(max_label, s.label);
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty()) {
    throw DataError("CSV file " + path.string() + " contains no data rows");
  }
  data.num_classes = std::max(2, max_label + 1);
  return data;
}

}  // namespace dpfl
