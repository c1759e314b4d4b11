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

#include "dpfl/param_vector.h"

#include <cmath>
#include <utility>

#include "dpfl/errors.h"

namespace dpfl {

ParamVector::ParamVector(std::vector<LayerInfo> layers)
    : layers_(std::move(layers)) {
  offsets_.reserve(layers_.size());
  std::size_t total = 0;
  for (const LayerInfo& info : layers_) {
    offsets_.push_back(total);
    total += info.size;
  }
  values_.assign(total, 0.0);
}

ParamVector ParamVector::FromValues(std::vector<double> values) {
  ParamVector out({LayerInfo{"", values.size()}});
  out.values_ = std::move(values);
  return out;
}

ParamVector ParamVector::ZerosLike(const ParamVector& other) {
  ParamVector out;
  out.layers_ = other.layers_;
  out.offsets_ = other.offsets_;
  out.values_.assign(other.values_.size(), 0.0);
  return out;
}

bool ParamVector::SameLayout(const ParamVector& other) const {
  return layers_ == other.layers_;
}

void ParamVector::RequireSameLayout(const ParamVector& other,
                                    const char* what) const {
  if (!SameLayout(other)) {
    throw ConfigError(std::string(what) + ": parameter layouts differ (dim " +
                      std::to_string(dim()) + " vs " +
                      std::to_string(other.dim()) + ")");
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  RequireSameLayout(other, "add");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  RequireSameLayout(other, "subtract");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

ParamVector& ParamVector::Axpy(double scale, const ParamVector& other) {
  RequireSameLayout(other, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += scale * other.values_[i];
  }
  return *this;
}

ParamVector& ParamVector::HadamardInPlace(const ParamVector& other) {
  RequireSameLayout(other, "hadamard");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

double ParamVector::Dot(const ParamVector& other) const {
  RequireSameLayout(other, "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    sum += values_[i] * other.values_[i];
  }
  return sum;
}

double ParamVector::SquaredNorm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return sum;
}

double ParamVector::Norm() const { return std::sqrt(SquaredNorm()); }

bool ParamVector::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(double scale, ParamVector a) { return a *= scale; }
ParamVector Hadamard(ParamVector a, const ParamVector& b) {
  return a.HadamardInPlace(b);
}

}  // namespace dpfl
