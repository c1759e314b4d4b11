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

#include "dpfl/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpfl/errors.h"
#include "dpfl/rng.h"

namespace dpfl {
namespace {

std::vector<const Sample*> Pointers(std::span<const Sample> batch) {
  std::vector<const Sample*> out;
  out.reserve(batch.size());
  for (const Sample& s : batch) out.push_back(&s);
  return out;
}

void CheckBatch(const MlpModel& model, std::span<const Sample* const> batch) {
  if (batch.empty()) throw ConfigError("batch must not be empty");
  const std::size_t in = model.spec.input_dim();
  const std::size_t out = model.spec.output_dim();
  for (const Sample* s : batch) {
    if (s->features.size() != in) {
      throw ConfigError("feature length " + std::to_string(s->features.size()) +
                        " does not match model input size " +
                        std::to_string(in));
    }
    if (model.spec.loss == LossKind::kSoftmaxCrossEntropy ||
        s->target.empty()) {
      if (s->label < 0 || static_cast<std::size_t>(s->label) >= out) {
        throw ConfigError("label " + std::to_string(s->label) +
                          " outside [0, " + std::to_string(out) + ")");
      }
    } else if (s->target.size() != out) {
      throw ConfigError("target length does not match model output size");
    }
  }
}

double Activate(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : z;
}

double ActivateDerivative(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

// Pre-activations z[l] and activations a[l] for every layer; a[0] is the input.
struct Trace {
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> a;
};

Trace RunForward(const MlpModel& model, std::span<const double> x) {
  const MlpSpec& spec = model.spec;
  const std::size_t layers = spec.num_dense();
  Trace t;
  t.z.resize(layers + 1);
  t.a.resize(layers + 1);
  t.a[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    std::span<const double> w = model.params.layer(2 * l);
    std::span<const double> b = model.params.layer(2 * l + 1);
    std::vector<double>& z = t.z[l + 1];
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double sum = b[o];
      const double* row = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) sum += row[i] * t.a[l][i];
      z[o] = sum;
    }
    std::vector<double>& a = t.a[l + 1];
    a.resize(out);
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < out; ++o) {
      a[o] = hidden ? Activate(spec.activation, z[o]) : z[o];
    }
  }
  return t;
}

double LogSumExp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

// Per-sample loss and dLoss/dOutput.
double SampleLoss(const MlpSpec& spec, const Sample& s,
                  std::span<const double> out, std::vector<double>* grad_out) {
  const std::size_t k = out.size();
  if (spec.loss == LossKind::kSoftmaxCrossEntropy) {
    const double lse = LogSumExp(out);
    if (grad_out != nullptr) {
      grad_out->resize(k);
      for (std::size_t i = 0; i < k; ++i) (*grad_out)[i] = std::exp(out[i] - lse);
      (*grad_out)[s.label] -= 1.0;
    }
    return lse - out[s.label];
  }
  double loss = 0.0;
  if (grad_out != nullptr) grad_out->resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double y = s.target.empty()
                         ? (static_cast<std::size_t>(s.label) == i ? 1.0 : 0.0)
                         : s.target[i];
    const double r = out[i] - y;
    loss += 0.5 * r * r;
    if (grad_out != nullptr) (*grad_out)[i] = r;
  }
  return loss;
}

}  // namespace

std::string ToString(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

std::string ToString(LossKind l) {
  return l == LossKind::kSoftmaxCrossEntropy ? "cross_entropy" : "squared_error";
}

Activation ParseActivation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + s + "' (expected relu|identity)");
}

LossKind ParseLossKind(const std::string& s) {
  if (s == "cross_entropy") return LossKind::kSoftmaxCrossEntropy;
  if (s == "squared_error") return LossKind::kSquaredError;
  throw ConfigError("unknown loss '" + s +
                    "' (expected cross_entropy|squared_error)");
}

void MlpSpec::Validate() const {
  if (layer_sizes.size() < 2) {
    throw ConfigError("model needs at least input and output sizes");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ConfigError("model layer sizes must be positive");
  }
}

std::vector<ParamVector::LayerInfo> MlpSpec::Layout() const {
  std::vector<ParamVector::LayerInfo> layout;
  for (std::size_t l = 0; l < num_dense(); ++l) {
    const std::string prefix = "dense" + std::to_string(l);
    layout.push_back({prefix + ".weight", layer_sizes[l] * layer_sizes[l + 1]});
    layout.push_back({prefix + ".bias", layer_sizes[l + 1]});
  }
  return layout;
}

MlpModel MlpModel::Zeros(const MlpSpec& spec) {
  spec.Validate();
  return MlpModel{spec, ParamVector(spec.Layout())};
}

MlpModel MlpModel::Initialize(const MlpSpec& spec, std::uint64_t seed) {
  MlpModel model = Zeros(spec);
  Rng rng(seed, StreamTag::kInit, 0, 0);
  for (std::size_t l = 0; l < spec.num_dense(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.layer_sizes[l]));
    for (std::size_t j : {2 * l, 2 * l + 1}) {
      for (double& v : model.params.layer(j)) v = rng.Uniform(-bound, bound);
    }
  }
  return model;
}

std::vector<double> Forward(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.spec.input_dim()) {
    throw ConfigError("feature length does not match model input size");
  }
  return RunForward(model, x).a.back();
}

double ForwardLoss(const MlpModel& model, std::span<const Sample* const> batch) {
  CheckBatch(model, batch);
  double total = 0.0;
  for (const Sample* s : batch) {
    const Trace t = RunForward(model, s->features);
    total += SampleLoss(model.spec, *s, t.a.back(), nullptr);
  }
  return total / static_cast<double>(batch.size());
}

double ForwardLoss(const MlpModel& model, std::span<const Sample> batch) {
  const std::vector<const Sample*> ptrs = Pointers(batch);
  return ForwardLoss(model, ptrs);
}

LossAndGradient LossGradient(const MlpModel& model,
                             std::span<const Sample* const> batch) {
  CheckBatch(model, batch);
  const MlpSpec& spec = model.spec;
  const std::size_t layers = spec.num_dense();
  LossAndGradient result{0.0, ParamVector::ZerosLike(model.params)};
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (const Sample* s : batch) {
    const Trace t = RunForward(model, s->features);
    result.loss += SampleLoss(spec, *s, t.a.back(), &delta);
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = spec.layer_sizes[l];
      const std::size_t out = spec.layer_sizes[l + 1];
      std::span<double> gw = result.gradient.layer(2 * l);
      std::span<double> gb = result.gradient.layer(2 * l + 1);
      const std::vector<double>& a_in = t.a[l];
      for (std::size_t o = 0; o < out; ++o) {
        double* row = gw.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) row[i] += delta[o] * a_in[i];
        gb[o] += delta[o];
      }
      if (l == 0) break;
      std::span<const double> w = model.params.layer(2 * l);
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double* row = w.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += row[i] * delta[o];
      }
      for (std::size_t i = 0; i < in; ++i) {
        prev_delta[i] *= ActivateDerivative(spec.activation, t.z[l][i]);
      }
      delta.swap(prev_delta);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  result.loss *= inv;
  result.gradient *= inv;
  return result;
}

LossAndGradient LossGradient(const MlpModel& model, std::span<const Sample> batch) {
  const std::vector<const Sample*> ptrs = Pointers(batch);
  return LossGradient(model, ptrs);
}

ParamVector Backward(const MlpModel& model, std::span<const Sample* const> batch) {
  return LossGradient(model, batch).gradient;
}

ParamVector Backward(const MlpModel& model, std::span<const Sample> batch) {
  return LossGradient(model, batch).gradient;
}

int Predict(const MlpModel& model, std::span<const double> x) {
  const std::vector<double> out = Forward(model, x);
  return static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
}

namespace {

EvalResult Summarize(std::span<const double> losses, std::span<const char> hits) {
  EvalResult r;
  double total = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    total += losses[i];
    correct += hits[i] != 0 ? 1 : 0;
  }
  const double n = static_cast<double>(losses.size());
  r.loss = total / n;
  r.accuracy = static_cast<double>(correct) / n;
  return r;
}

void EvaluateOne(const MlpModel& model, const Sample& s, double* loss,
                 char* hit) {
  const Trace t = RunForward(model, s.features);
  const std::vector<double>& out = t.a.back();
  *loss = SampleLoss(model.spec, s, out, nullptr);
  const auto best = std::max_element(out.begin(), out.end()) - out.begin();
  *hit = best == s.label ? 1 : 0;
}

}  // namespace

EvalResult Evaluate(const MlpModel& model, std::span<const Sample> samples) {
  if (samples.empty()) return {};
  const std::vector<const Sample*> ptrs = Pointers(samples);
  CheckBatch(model, ptrs);
  std::vector<double> losses(samples.size());
  std::vector<char> hits(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EvaluateOne(model, samples[i], &losses[i], &hits[i]);
  }
  return Summarize(losses, hits);
}

EvalResult EvaluateParallel(const MlpModel& model,
                            std::span<const Sample> samples) {
  if (samples.empty()) return {};
  const std::vector<const Sample*> ptrs = Pointers(samples);
  CheckBatch(model, ptrs);
  std::vector<double> losses(samples.size());
  std::vector<char> hits(samples.size());
  const auto n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    EvaluateOne(model, samples[i], &losses[i], &hits[i]);
  }
  return Summarize(losses, hits);
}

}  // namespace dpfl
