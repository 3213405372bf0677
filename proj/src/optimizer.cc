// Copyright 2026 The Mathlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mathlink/optimizer.h"

#include <cmath>

#include "mathlink/errors.h"

namespace mathlink {

LinearWarmupDecay::LinearWarmupDecay(double peak, int64_t warmup_steps, int64_t total_steps)
    : peak_(peak), warmup_steps_(warmup_steps), total_steps_(total_steps) {
  if (peak <= 0.0) throw ConfigError("learning rate must be positive");
  if (warmup_steps < 1 || total_steps < warmup_steps) {
    throw ConfigError("schedule needs 1 <= warmup_steps <= total_steps");
  }
}

double LinearWarmupDecay::LearningRate(int64_t step) const {
  if (step < 0) return 0.0;
  if (step < warmup_steps_) {
    return peak_ * static_cast<double>(step + 1) / static_cast<double>(warmup_steps_);
  }
  if (step >= total_steps_) return 0.0;
  if (total_steps_ == warmup_steps_) return 0.0;
  return peak_ * static_cast<double>(total_steps_ - step) /
         static_cast<double>(total_steps_ - warmup_steps_);
}

double GlobalGradNorm(std::span<const NamedParameter> params) {
  double sum = 0.0;
  for (const auto &p : params) sum += p.param->grad.squaredNorm();
  return std::sqrt(sum);
}

double ClipGradNorm(std::span<const NamedParameter> params, double max_norm) {
  const double norm = GlobalGradNorm(params);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto &p : params) p.param->grad *= scale;
  }
  return norm;
}

AdamW::AdamW(std::vector<NamedParameter> params, Options options)
    : params_(std::move(params)), options_(options) {
  for (const auto &p : params_) {
    first_moment_.push_back(Matrix::Zero(p.param->value.rows(), p.param->value.cols()));
    second_moment_.push_back(Matrix::Zero(p.param->value.rows(), p.param->value.cols()));
  }
}

void AdamW::Step(double learning_rate) {
  ++step_;
  const double correction1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter &p = *params_[i].param;
    Matrix &m = first_moment_[i];
    Matrix &v = second_moment_[i];
    p.value *= 1.0 - learning_rate * options_.weight_decay;
    m = options_.beta1 * m + (1.0 - options_.beta1) * p.grad;
    v = options_.beta2 * v + (1.0 - options_.beta2) * p.grad.cwiseAbs2();
    const Matrix denom =
        ((v / correction2).cwiseSqrt().array() + options_.epsilon).matrix();
    p.value -= learning_rate * ((m / correction1).array() / denom.array()).matrix();
  }
}

void AdamW::ZeroGrad() {
  for (auto &p : params_) p.param->ZeroGrad();
}

}  // namespace mathlink
