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

#ifndef MATHLINK_PARAMETER_H_
#define MATHLINK_PARAMETER_H_

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mathlink {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// A trainable weight matrix with its accumulated gradient.
struct Parameter {
  Matrix value;
  Matrix grad;

  void Resize(Eigen::Index rows, Eigen::Index cols) {
    value = Matrix::Zero(rows, cols);
    grad = Matrix::Zero(rows, cols);
  }
  void ZeroGrad() { grad.setZero(); }
};

struct NamedParameter {
  std::string name;
  Parameter *param;
};

// Fills with i.i.d. N(0, stddev^2) draws in row-major order.
inline void InitNormal(Matrix &m, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = normal(rng);
  }
}

}  // namespace mathlink

#endif  // MATHLINK_PARAMETER_H_
