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

#ifndef MATHLINK_OPTIMIZER_H_
#define MATHLINK_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mathlink/parameter.h"

namespace mathlink {

// Linear warmup to `peak` over `warmup_steps`, then linear decay reaching 0
// at `total_steps`. Step indices are 0-based optimizer updates; the first
// update already gets peak / warmup_steps.
class LinearWarmupDecay {
 public:
  LinearWarmupDecay(double peak, int64_t warmup_steps, int64_t total_steps);

  double LearningRate(int64_t step) const;

  int64_t warmup_steps() const { return warmup_steps_; }
  int64_t total_steps() const { return total_steps_; }

 private:
  double peak_;
  int64_t warmup_steps_;
  int64_t total_steps_;
};

double GlobalGradNorm(std::span<const NamedParameter> params);

// Scales all gradients so their joint L2 norm is at most max_norm. Returns
// the norm before clipping.
double ClipGradNorm(std::span<const NamedParameter> params, double max_norm);

// Adam with decoupled weight decay.
class AdamW {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
  };

  AdamW(std::vector<NamedParameter> params, Options options);

  void Step(double learning_rate);
  void ZeroGrad();

  int64_t steps() const { return step_; }

 private:
  std::vector<NamedParameter> params_;
  Options options_;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  int64_t step_ = 0;
};

}  // namespace mathlink

#endif  // MATHLINK_OPTIMIZER_H_
