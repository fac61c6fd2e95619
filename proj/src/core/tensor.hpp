// src/core/tensor.hpp
//
// Copyright 2026 lhuclab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Dense row-major double-precision tensors and the handful of numerical
// primitives everything else is built on.  Loops are hand-rolled rather than
// delegated to a BLAS so that accumulation order is fixed (inner loops run
// over ascending indices); bit-exact reproducibility is part of the contract.

#ifndef LHUC_CORE_TENSOR_HPP_
#define LHUC_CORE_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lhuc {

using Vector = std::vector<double>;

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  std::span<double> row(int r) {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

std::string shape_str(const Matrix& m);

// out[t][j] = sum_i W[j][i] * X[t][i] + b[j].  W is units x inputs, X is
// batch x inputs.  The sum over i runs in ascending order.
Matrix affine(const Matrix& W, const Vector& b, const Matrix& X);

enum class Activation { sigmoid, linear };

double sigmoid(double z);  // overflow-safe on both tails
Matrix activate(Activation kind, const Matrix& z);

// Row-wise softmax with per-row max subtraction; rows sum to 1.
Matrix softmax(const Matrix& logits);

struct LossGrad {
  double loss = 0.0;
  Matrix grad;  // gradient of the mean loss w.r.t. the first argument
};

// Mean cross-entropy of softmax(logits) against integer targets.
// grad[t] = (softmax(logits[t]) - onehot(targets[t])) / batch.
LossGrad softmax_xent(const Matrix& logits, std::span<const int> targets);

// Mean squared error over all entries; grad = 2 * (pred - target) / count.
LossGrad mse(const Matrix& pred, const Matrix& target);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

}  // namespace lhuc

#endif  // LHUC_CORE_TENSOR_HPP_
