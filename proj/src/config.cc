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

#include "dpfl/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

#include "dpfl/errors.h"

namespace dpfl {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Where() + ": expected an object");
  }

  bool Has(const std::string& key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json* Get(const std::string& key) {
    seen_.insert(key);
    if (!Has(key)) return nullptr;
    return &j_.at(key);
  }

  double Number(const std::string& key, double fallback) {
    const json* v = Get(key);
    if (v == nullptr) return fallback;
    return AsNumber(*v, key);
  }

  std::optional<double> OptionalNumber(const std::string& key) {
    const json* v = Get(key);
    if (v == nullptr) return std::nullopt;
    return AsNumber(*v, key);
  }

  long long Integer(const std::string& key, long long fallback) {
    const json* v = Get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) {
      throw ConfigError(Field(key) + ": expected an integer");
    }
    return v->get<long long>();
  }

  std::optional<std::uint64_t> OptionalSeed(const std::string& key) {
    const json* v = Get(key);
    if (v == nullptr) return std::nullopt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<long long>() >= 0) {
      return static_cast<std::uint64_t>(v->get<long long>());
    }
    throw ConfigError(Field(key) + ": expected a non-negative integer");
  }

  bool Bool(const std::string& key, bool fallback) {
    const json* v = Get(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(Field(key) + ": expected a boolean");
    return v->get<bool>();
  }

  std::string String(const std::string& key, const std::string& fallback) {
    const json* v = Get(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(Field(key) + ": expected a string");
    return v->get<std::string>();
  }

  // Optional nested object; an empty object when absent.
  json Object(const std::string& key) {
    const json* v = Get(key);
    if (v == nullptr) return json::object();
    return *v;
  }

  std::string Field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw ConfigError(Field(it.key()) + ": unknown field");
      }
    }
  }

 private:
  double AsNumber(const json& v, const std::string& key) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "inf" ||
                          v.get<std::string>() == "infinity")) {
      return kInf;
    }
    throw ConfigError(Field(key) + ": expected a number");
  }

  std::string Where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

int ToInt(long long v, const std::string& field) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(field + ": out of range");
  }
  return static_cast<int>(v);
}

std::size_t ToSize(long long v, const std::string& field) {
  if (v < 0) throw ConfigError(field + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

json NumberOrInf(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

template <typename Fn>
void WithField(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

}  // namespace

double ExperimentConfig::EffectiveDelta() const {
  if (delta.has_value()) return *delta;
  return partition.agents > 1 ? 1.0 / static_cast<double>(partition.agents) : 1e-5;
}

FederationConfig ExperimentConfig::Federation() const {
  FederationConfig f;
  f.train = train;
  f.train.seed = seed;
  f.dp = dp;
  f.dp.delta = EffectiveDelta();
  f.blur = blur;
  f.sparsity = sparsity;
  return f;
}

MlpSpec ExperimentConfig::ModelSpec(std::size_t input_dim, int num_classes) const {
  MlpSpec spec;
  spec.layer_sizes.push_back(input_dim);
  for (std::size_t h : model.hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(static_cast<std::size_t>(num_classes));
  spec.activation = model.activation;
  spec.loss = model.loss;
  return spec;
}

ExperimentConfig ParseConfig(const json& j) {
  ExperimentConfig cfg;
  ObjectReader root(j, "");
  cfg.name = root.String("name", cfg.name);
  cfg.seed = root.OptionalSeed("seed").value_or(0);
  cfg.output_dir = root.String("output_dir", "runs/" + cfg.name);

  {
    const json obj = root.Object("data");
    ObjectReader r(obj, "data");
    const std::string source = r.String("source", "synthetic");
    DataSourceConfig& d = cfg.data;
    if (source == "synthetic") {
      d.kind = DataSourceKind::kSynthetic;
      d.synthetic.classes = ToInt(r.Integer("classes", d.synthetic.classes), "data.classes");
      d.synthetic.dim = ToSize(r.Integer("dim", static_cast<long long>(d.synthetic.dim)), "data.dim");
      d.synthetic.per_class = ToSize(
          r.Integer("per_class", static_cast<long long>(d.synthetic.per_class)), "data.per_class");
      d.synthetic.separation = r.Number("separation", d.synthetic.separation);
    } else if (source == "csv") {
      d.kind = DataSourceKind::kCsv;
      d.path = r.String("path", "");
      d.test_path = r.String("test_path", "");
    } else {
      throw ConfigError("data.source: expected \"synthetic\" or \"csv\"");
    }
    d.test_fraction = r.Number("test_fraction", d.test_fraction);
    cfg.data_seed = r.OptionalSeed("seed");
    r.Finish();
  }
  {
    const json obj = root.Object("partition");
    ObjectReader r(obj, "partition");
    WithField("partition.scheme", [&] {
      cfg.partition.scheme = ParsePartitionScheme(r.String("scheme", "dirichlet"));
    });
    cfg.partition.alpha = r.Number("alpha", cfg.partition.alpha);
    cfg.partition.agents = ToInt(r.Integer("agents", cfg.partition.agents), "partition.agents");
    cfg.partition_seed = r.OptionalSeed("seed");
    r.Finish();
  }
  {
    const json obj = root.Object("model");
    ObjectReader r(obj, "model");
    if (const json* hidden = r.Get("hidden")) {
      if (!hidden->is_array()) throw ConfigError("model.hidden: expected an array");
      cfg.model.hidden.clear();
      for (const json& h : *hidden) {
        if (!h.is_number_integer() || h.get<long long>() <= 0) {
          throw ConfigError("model.hidden: expected positive integers");
        }
        cfg.model.hidden.push_back(h.get<std::size_t>());
      }
    }
    WithField("model.activation", [&] {
      cfg.model.activation = ParseActivation(r.String("activation", "relu"));
    });
    WithField("model.loss", [&] {
      cfg.model.loss = ParseLossKind(r.String("loss", "cross_entropy"));
    });
    r.Finish();
  }
  {
    const json obj = root.Object("train");
    ObjectReader r(obj, "train");
    TrainConfig& t = cfg.train;
    t.local_lr = r.Number("local_lr", t.local_lr);
    t.server_lr = r.Number("server_lr", t.server_lr);
    t.local_steps = ToInt(r.Integer("local_steps", t.local_steps), "train.local_steps");
    t.rounds = ToInt(r.Integer("rounds", t.rounds), "train.rounds");
    t.batch_size = ToInt(r.Integer("batch_size", t.batch_size), "train.batch_size");
    t.parallel = r.Bool("parallel", t.parallel);
    r.Finish();
  }
  {
    const json obj = root.Object("dp");
    ObjectReader r(obj, "dp");
    DpConfig& d = cfg.dp;
    d.clip_threshold = r.Number("clip", d.clip_threshold);
    d.noise_multiplier = r.OptionalNumber("noise_multiplier");
    d.target_epsilon = r.OptionalNumber("target_epsilon");
    d.sample_prob = r.Number("sample_prob", d.sample_prob);
    cfg.delta = r.OptionalNumber("delta");
    r.Finish();
  }
  {
    const json obj = root.Object("blur");
    ObjectReader r(obj, "blur");
    cfg.blur.lambda = r.Number("lambda", cfg.blur.lambda);
    r.Finish();
  }
  {
    const json obj = root.Object("sparsity");
    ObjectReader r(obj, "sparsity");
    cfg.sparsity.sparsity = r.Number("c", cfg.sparsity.sparsity);
    r.Finish();
  }
  root.Finish();
  ValidateConfig(cfg);
  return cfg;
}

ExperimentConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return ParseConfig(j);
}

void ValidateConfig(const ExperimentConfig& cfg) {
  if (cfg.data.kind == DataSourceKind::kSynthetic) {
    if (cfg.data.synthetic.classes < 2) throw ConfigError("data.classes: must be >= 2");
    if (cfg.data.synthetic.dim < 1) throw ConfigError("data.dim: must be >= 1");
    if (cfg.data.synthetic.per_class < 1) throw ConfigError("data.per_class: must be >= 1");
    if (!(cfg.data.synthetic.separation >= 0.0)) {
      throw ConfigError("data.separation: must be >= 0");
    }
  } else if (cfg.data.path.empty()) {
    throw ConfigError("data.path: required for csv source");
  }
  if (!(cfg.data.test_fraction >= 0.0 && cfg.data.test_fraction < 1.0)) {
    throw ConfigError("data.test_fraction: must lie in [0, 1)");
  }
  WithField("partition", [&] { cfg.partition.Validate(); });
  for (std::size_t h : cfg.model.hidden) {
    if (h == 0) throw ConfigError("model.hidden: sizes must be positive");
  }
  WithField("train", [&] { cfg.train.Validate(); });
  if (cfg.delta.has_value() && !(*cfg.delta > 0.0 && *cfg.delta < 1.0)) {
    throw ConfigError("dp.delta: must lie in (0, 1)");
  }
  DpConfig dp = cfg.dp;
  dp.delta = cfg.EffectiveDelta();
  WithField("dp", [&] { dp.Validate(); });
  if (!(cfg.blur.lambda >= 0.0)) throw ConfigError("blur.lambda: must be >= 0");
  if (!(cfg.blur.lambda * cfg.train.local_lr < 1.0)) {
    throw ConfigError("blur.lambda: lambda * local_lr must be < 1 (got " +
                      std::to_string(cfg.blur.lambda * cfg.train.local_lr) + ")");
  }
  WithField("sparsity.c", [&] { cfg.sparsity.Validate(); });
}

json ToJson(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;

  json data;
  if (cfg.data.kind == DataSourceKind::kSynthetic) {
    data["source"] = "synthetic";
    data["classes"] = cfg.data.synthetic.classes;
    data["dim"] = cfg.data.synthetic.dim;
    data["per_class"] = cfg.data.synthetic.per_class;
    data["separation"] = cfg.data.synthetic.separation;
  } else {
    data["source"] = "csv";
    data["path"] = cfg.data.path;
    data["test_path"] = cfg.data.test_path;
  }
  data["test_fraction"] = cfg.data.test_fraction;
  data["seed"] = cfg.data_seed.has_value() ? json(*cfg.data_seed) : json(nullptr);
  j["data"] = data;

  j["partition"] = {
      {"scheme", ToString(cfg.partition.scheme)},
      {"alpha", cfg.partition.alpha},
      {"agents", cfg.partition.agents},
      {"seed", cfg.partition_seed.has_value() ? json(*cfg.partition_seed)
                                              : json(nullptr)}};
  j["model"] = {{"hidden", cfg.model.hidden},
                {"activation", ToString(cfg.model.activation)},
                {"loss", ToString(cfg.model.loss)}};
  j["train"] = {{"local_lr", cfg.train.local_lr},
                {"server_lr", cfg.train.server_lr},
                {"local_steps", cfg.train.local_steps},
                {"rounds", cfg.train.rounds},
                {"batch_size", cfg.train.batch_size},
                {"parallel", cfg.train.parallel}};
  j["dp"] = {{"clip", NumberOrInf(cfg.dp.clip_threshold)},
             {"noise_multiplier", cfg.dp.noise_multiplier.has_value()
                                      ? json(*cfg.dp.noise_multiplier)
                                      : json(nullptr)},
             {"target_epsilon", cfg.dp.target_epsilon.has_value()
                                    ? json(*cfg.dp.target_epsilon)
                                    : json(nullptr)},
             {"sample_prob", cfg.dp.sample_prob},
             {"delta", cfg.delta.has_value() ? json(*cfg.delta) : json(nullptr)}};
  j["blur"] = {{"lambda", cfg.blur.lambda}};
  j["sparsity"] = {{"c", cfg.sparsity.sparsity}};
  return j;
}

ExperimentConfig WithOverride(const ExperimentConfig& cfg, const std::string& axis,
                              const json& value) {
  static const std::vector<std::pair<std::string, std::string>> kAliases = {
      {"lambda", "blur.lambda"},         {"sparsity", "sparsity.c"},
      {"c", "sparsity.c"},               {"clip", "dp.clip"},
      {"sigma", "dp.noise_multiplier"},  {"epsilon", "dp.target_epsilon"},
      {"sample_prob", "dp.sample_prob"}, {"alpha", "partition.alpha"},
      {"local_steps", "train.local_steps"}, {"local_lr", "train.local_lr"},
      {"rounds", "train.rounds"},        {"seed", "seed"},
  };
  std::string path = axis;
  for (const auto& [alias, target] : kAliases) {
    if (axis == alias) path = target;
  }
  json j = ToJson(cfg);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!node->is_object() || key.empty()) {
      throw ConfigError("sweep axis '" + axis + "' does not name a config field");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  if (path == "dp.noise_multiplier") j["dp"]["target_epsilon"] = nullptr;
  if (path == "dp.target_epsilon") j["dp"]["noise_multiplier"] = nullptr;
  return ParseConfig(j);
}

std::string ConfigHash(const ExperimentConfig& cfg) {
  json j = ToJson(cfg);
  j.erase("output_dir");
  j.erase("name");
  j["train"].erase("parallel");
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpfl
