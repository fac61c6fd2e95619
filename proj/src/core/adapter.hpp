// src/core/adapter.hpp
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
// Test-time adaptation: estimate a fresh per-cluster transform on adaptation
// data with the shared weights frozen, evaluate models under transforms or
// effective scales, and combine speaker and environment transforms by convex
// interpolation in applied-scale space.

#ifndef LHUC_CORE_ADAPTER_HPP_
#define LHUC_CORE_ADAPTER_HPP_

#include <map>
#include <optional>
#include <vector>

#include "core/dataset.hpp"
#include "core/model.hpp"

namespace lhuc {

struct AdaptConfig {
  double lr = 0.8;
  int sweeps = 1;          // passes over the adaptation data, temporal order
  int batch_size = 32;
  ReparamKind kind = ReparamKind::exp;
  std::vector<bool> layers_enabled;  // empty = all hidden layers adapt
  bool supervised = false;           // use true labels instead of first-pass ones
};

// Hard first-pass targets: argmax of the classifier posterior per frame, ties
// to the lowest class index.
std::vector<int> pseudo_label(const NetworkParams& net, const FrameDataset& data);
std::vector<int> pseudo_label(const NetworkParams& net, const EffectiveScale& s,
                              const FrameDataset& data);
// Cluster-0 transform of the bank (speaker-independent mode).
std::vector<int> pseudo_label(const NetworkParams& net, const TransformBank& bank,
                              const FrameDataset& data);

// Gradient descent on the raw amplitudes only; the shared weights never
// change.  `labels` overrides the dataset labels when non-null (ignored for
// regression).  Batches run in temporal order, no shuffling.
LhucTransform adapt(const NetworkParams& net, const FrameDataset& data,
                    const std::vector<int>* labels, const AdaptConfig& cfg);

struct ClusterMetrics {
  double frame_error_rate = 0.0;
  double mean_loss = 0.0;
  long long frames = 0;
};

struct Metrics {
  double frame_error_rate = 0.0;  // 0 for regression tasks
  double mean_loss = 0.0;
  long long frames = 0;
  std::map<int, ClusterMetrics> per_cluster;  // keyed by speaker id
};

Metrics evaluate(const NetworkParams& net, const FrameDataset& data);
Metrics evaluate(const NetworkParams& net, const LhucTransform& t,
                 const FrameDataset& data);
Metrics evaluate(const NetworkParams& net, const EffectiveScale& s,
                 const FrameDataset& data);

struct TwoPassResult {
  LhucTransform transform;
  Metrics unadapted;
  Metrics adapted;
  std::vector<int> first_pass_labels;
};

// First pass decodes with the speaker-independent model (cluster 0 when a
// bank is given), the second pass adapts on those targets, and both passes
// are scored against the true labels.  cfg.supervised substitutes the true
// labels as adaptation targets.
TwoPassResult two_pass_adapt(const NetworkParams& net, const TransformBank* bank,
                             const FrameDataset& data, const AdaptConfig& cfg);

// Reuse a transform estimated on one session for another dataset.
Metrics one_shot_apply(const NetworkParams& net, const LhucTransform& from,
                       const FrameDataset& data);

// alpha * s + (1 - alpha) * e, elementwise in applied-scale space.
EffectiveScale interpolate(const EffectiveScale& s, const EffectiveScale& e,
                           double alpha);

struct FactorisedCondition {
  int speaker = 0;
  int env = 0;
  long long frames = 0;
  double fer_unadapted = 0.0;
  double fer_speaker = 0.0;
  double fer_env = 0.0;
  double fer_interpolated = 0.0;
  double fer_joint = 0.0;
};

struct FactorisedReport {
  double alpha = 0.0;
  Metrics unadapted, speaker_only, env_only, interpolated, joint;
  std::vector<FactorisedCondition> conditions;
};

// Per (speaker, environment) condition: speaker transforms come from the
// speaker's clean-environment data, environment transforms from that
// environment's data excluding the target speaker (falling back to the full
// environment subset if exclusion empties it), joint transforms from the
// condition data itself.  All estimation is unsupervised via first-pass
// targets unless cfg.supervised is set; scoring uses true labels.
FactorisedReport factorised_experiment(const NetworkParams& net,
                                       const FrameDataset& data, int clean_env,
                                       double alpha, const AdaptConfig& cfg);

}  // namespace lhuc

#endif  // LHUC_CORE_ADAPTER_HPP_
