// src/core/tensor.cpp
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

#include "core/tensor.hpp"

#include <cmath>

#include "core/error.hpp"

namespace lhuc {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

Matrix affine(const Matrix& W, const Vector& b, const Matrix& X) {
  if (W.cols != X.cols) {
    throw Error(ErrorCode::shape,
                "affine: weights " + shape_str(W) + " incompatible with input " +
                    shape_str(X) + " (inner dimensions must match)");
  }
  if (static_cast<int>(b.size()) != W.rows) {
    throw Error(ErrorCode::shape,
                "affine: bias has " + std::to_string(b.size()) +
                    " entries but weights " + shape_str(W) + " have " +
                    std::to_string(W.rows) + " rows");
  }
  Matrix out(X.rows, W.rows);
  for (int t = 0; t < X.rows; ++t) {
    const double* x = X.data.data() + static_cast<std::size_t>(t) * X.cols;
    double* o = out.data.data() + static_cast<std::size_t>(t) * out.cols;
    for (int j = 0; j < W.rows; ++j) {
      const double* w = W.data.data() + static_cast<std::size_t>(j) * W.cols;
      double acc = 0.0;
      for (int i = 0; i < W.cols; ++i) acc += w[i] * x[i];
      o[j] = acc + b[j];
    }
  }
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix activate(Activation kind, const Matrix& z) {
  if (kind == Activation::linear) return z;
  Matrix out(z.rows, z.cols);
  for (std::size_t i = 0; i < z.data.size(); ++i) out.data[i] = sigmoid(z.data[i]);
  return out;
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows, logits.cols);
  for (int t = 0; t < logits.rows; ++t) {
    auto row = logits.row(t);
    double mx = row[0];
    for (int k = 1; k < logits.cols; ++k) mx = std::max(mx, row[k]);
    double sum = 0.0;
    for (int k = 0; k < logits.cols; ++k) {
      const double e = std::exp(row[k] - mx);
      out(t, k) = e;
      sum += e;
    }
    for (int k = 0; k < logits.cols; ++k) out(t, k) /= sum;
  }
  return out;
}

LossGrad softmax_xent(const Matrix& logits, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != logits.rows) {
    throw Error(ErrorCode::shape,
                "softmax_xent: " + std::to_string(targets.size()) +
                    " targets for " + std::to_string(logits.rows) + " rows");
  }
  if (logits.rows == 0 || logits.cols == 0) {
    throw Error(ErrorCode::invalid_argument, "softmax_xent: empty logits");
  }
  LossGrad out;
  out.grad = Matrix(logits.rows, logits.cols);
  const double inv_batch = 1.0 / logits.rows;
  double total = 0.0;
  for (int t = 0; t < logits.rows; ++t) {
    const int y = targets[t];
    if (y < 0 || y >= logits.cols) {
      throw Error(ErrorCode::invalid_argument,
                  "softmax_xent: target " + std::to_string(y) +
                      " out of range for " + std::to_string(logits.cols) +
                      " classes (row " + std::to_string(t) + ")");
    }
    auto row = logits.row(t);
    double mx = row[0];
    for (int k = 1; k < logits.cols; ++k) mx = std::max(mx, row[k]);
    double sum = 0.0;
    for (int k = 0; k < logits.cols; ++k) sum += std::exp(row[k] - mx);
    // loss via log-sum-exp keeps the subtraction stable for saturated rows
    total += mx + std::log(sum) - row[y];
    for (int k = 0; k < logits.cols; ++k) {
      out.grad(t, k) = std::exp(row[k] - mx) / sum * inv_batch;
    }
    out.grad(t, y) -= inv_batch;
  }
  out.loss = total * inv_batch;
  return out;
}

LossGrad mse(const Matrix& pred, const Matrix& target) {
  if (!pred.same_shape(target)) {
    throw Error(ErrorCode::shape, "mse: prediction " + shape_str(pred) +
                                      " vs target " + shape_str(target));
  }
  if (pred.rows == 0 || pred.cols == 0) {
    throw Error(ErrorCode::invalid_argument, "mse: empty prediction");
  }
  LossGrad out;
  out.grad = Matrix(pred.rows, pred.cols);
  const double inv_n = 1.0 / (static_cast<double>(pred.rows) * pred.cols);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    total += d * d;
    out.grad.data[i] = 2.0 * d * inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

bool all_finite(const Matrix& m) {
  for (double v : m.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace lhuc
