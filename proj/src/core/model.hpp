// src/core/model.hpp
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
// Feedforward network with per-hidden-unit amplitude scaling.  A transform
// holds one raw amplitude parameter per hidden unit; a reparametrisation maps
// raw amplitudes to positive-ish scales that multiply the hidden activations.
// Scales are selected per frame through a cluster route (cluster 0 is the
// speaker-independent transform), which is what makes speaker-adaptive
// training and test-time adaptation possible with the speaker-independent
// weights untouched.

#ifndef LHUC_CORE_MODEL_HPP_
#define LHUC_CORE_MODEL_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace lhuc {

enum class ReparamKind { identity, exp, sigmoid2, relu };

const char* to_string(ReparamKind kind);
ReparamKind reparam_kind_from_string(const std::string& name);

struct ReparamOut {
  Vector scale;   // xi(amp)
  Vector dscale;  // d xi / d amp, elementwise
};

// identity: xi(a) = a            dxi = 1
// exp:      xi(a) = e^a          dxi = e^a
// sigmoid2: xi(a) = 2/(1+e^-a)   dxi = xi * (1 - xi/2), range (0, 2)
// relu:     xi(a) = max(0, a)    dxi = a > 0 ? 1 : 0 (defined as 0 at a == 0)
ReparamOut reparam(ReparamKind kind, const Vector& amp);

// Initial raw amplitude such that the initial scale is 1 (identity regime).
double reparam_init_amp(ReparamKind kind);

enum class OutputKind { softmax_classifier, linear_regressor };

struct Layer {
  Matrix W;  // units x inputs
  Vector b;  // units
};

struct NetworkParams {
  std::vector<Layer> layers;  // hidden layers then the output layer
  Activation hidden_activation = Activation::sigmoid;
  OutputKind output_kind = OutputKind::softmax_classifier;

  int n_hidden() const { return static_cast<int>(layers.size()) - 1; }
  int input_dim() const { return layers.front().W.cols; }
  int output_dim() const { return layers.back().W.rows; }
  int hidden_width(int l) const { return layers[l].W.rows; }

  // Checks the layer chaining invariant; throws ErrorCode::shape.
  void validate() const;
};

// dims = {input, hidden..., output}; weights are seeded uniform draws scaled
// by fan-in/fan-out, biases start at zero.
NetworkParams init_network(const std::vector<int>& dims, OutputKind output_kind,
                           std::uint64_t seed);

// One vector of raw amplitudes per hidden layer.
struct LhucTransform {
  ReparamKind kind = ReparamKind::exp;
  std::vector<Vector> amps;
};

LhucTransform init_transform(const NetworkParams& net, ReparamKind kind);

// Cluster id -> transform.  Cluster 0 is the reserved speaker-independent
// transform; real speakers use their own positive ids.
struct TransformBank {
  ReparamKind kind = ReparamKind::exp;
  std::map<int, LhucTransform> transforms;
};

TransformBank init_bank(const NetworkParams& net, ReparamKind kind,
                        std::span<const int> cluster_ids);

// Scales in applied (post-reparametrisation) space, one vector per hidden
// layer.  This is the representation transform interpolation works in, since
// not every reparametrisation is invertible.
struct EffectiveScale {
  std::vector<Vector> scale;
};

EffectiveScale to_scale(const LhucTransform& t);

// Everything the backward pass needs to replay one forward pass.
struct ForwardTrace {
  Matrix input;                 // batch x input_dim
  std::vector<Matrix> pre;      // per hidden layer: pre-activations
  std::vector<Matrix> basis;    // per hidden layer: activations before scaling
  std::vector<Matrix> scales;   // per hidden layer: per-frame applied scale; empty if unscaled
  std::vector<Matrix> hidden;   // per hidden layer: basis * scales
  Matrix output;                // batch x output_dim (logits or predictions)
  std::vector<int> routes;      // per-frame cluster ids; empty unless bank-routed
  bool scaled = false;
};

// Speaker-independent forward (no scaling).
ForwardTrace forward(const NetworkParams& net, const Matrix& X);
// Bank-routed forward: frame t is scaled by the transform of cluster routes[t].
ForwardTrace forward(const NetworkParams& net, const TransformBank& bank,
                     std::span<const int> routes, const Matrix& X);
// Single transform applied to every frame.
ForwardTrace forward(const NetworkParams& net, const LhucTransform& t, const Matrix& X);
// Effective scales applied directly to every frame (no raw amplitudes known).
ForwardTrace forward(const NetworkParams& net, const EffectiveScale& s, const Matrix& X);

struct Gradients {
  std::vector<Layer> theta;             // same shapes as NetworkParams::layers
  std::map<int, std::vector<Vector>> amp;  // cluster -> per-hidden-layer grads
};

// loss_grad is the gradient of the loss w.r.t. the network output.  Amplitude
// gradients accumulate per routed cluster over ascending frame index; clusters
// present in the bank but routed to no frame get exact zero gradients.  bank
// must be the one the trace was produced with (nullptr for unscaled traces).
Gradients backward(const ForwardTrace& trace, const NetworkParams& net,
                   const TransformBank* bank, const Matrix& loss_grad);

struct ParamCount {
  long long si = 0;           // weights + biases
  long long per_cluster = 0;  // amplitude parameters per cluster (total hidden units)
};

ParamCount count_parameters(const NetworkParams& net, const TransformBank* bank);

}  // namespace lhuc

#endif  // LHUC_CORE_MODEL_HPP_
