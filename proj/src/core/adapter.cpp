// src/core/adapter.cpp
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

#include "core/adapter.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace lhuc {

namespace {

// Argmax per row, ties to the lowest index.
std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows, 0);
  for (int t = 0; t < logits.rows; ++t) {
    auto row = logits.row(t);
    int best = 0;
    for (int k = 1; k < logits.cols; ++k) {
      if (row[k] > row[best]) best = k;
    }
    out[t] = best;
  }
  return out;
}

void require_classifier(const NetworkParams& net, const char* op) {
  if (net.output_kind != OutputKind::softmax_classifier) {
    throw Error(ErrorCode::unsupported,
                std::string(op) + ": classifier output head required");
  }
}

Metrics metrics_from_trace(const NetworkParams& net, const ForwardTrace& tr,
                           const FrameDataset& data) {
  const int n = data.frames();
  Metrics m;
  m.frames = n;
  double loss_sum = 0.0;
  long long err_sum = 0;
  for (int t = 0; t < n; ++t) {
    double frame_loss = 0.0;
    bool err = false;
    if (net.output_kind == OutputKind::softmax_classifier) {
      auto row = tr.output.row(t);
      const int y = data.labels[t];
      int best = 0;
      double mx = row[0];
      for (int k = 1; k < tr.output.cols; ++k) {
        if (row[k] > mx) {
          mx = row[k];
          best = k;
        }
      }
      double sum = 0.0;
      for (int k = 0; k < tr.output.cols; ++k) sum += std::exp(row[k] - mx);
      frame_loss = mx + std::log(sum) - row[y];
      err = best != y;
    } else {
      auto row = tr.output.row(t);
      auto tgt = data.targets.row(t);
      double acc = 0.0;
      for (int k = 0; k < tr.output.cols; ++k) {
        const double d = row[k] - tgt[k];
        acc += d * d;
      }
      frame_loss = acc / tr.output.cols;
    }
    loss_sum += frame_loss;
    err_sum += err ? 1 : 0;
    ClusterMetrics& c = m.per_cluster[data.speaker_ids[t]];
    c.frames += 1;
    c.mean_loss += frame_loss;
    c.frame_error_rate += err ? 1.0 : 0.0;
  }
  m.mean_loss = loss_sum / n;
  m.frame_error_rate = static_cast<double>(err_sum) / n;
  for (auto& [spk, c] : m.per_cluster) {
    (void)spk;
    c.mean_loss /= static_cast<double>(c.frames);
    c.frame_error_rate /= static_cast<double>(c.frames);
  }
  return m;
}

void require_frames(const FrameDataset& data, const char* op) {
  if (data.frames() == 0) {
    throw Error(ErrorCode::invalid_argument,
                std::string(op) + ": empty dataset");
  }
}

void check_labels_match(const FrameDataset& data, const std::vector<int>* labels,
                        const char* op) {
  if (labels && static_cast<int>(labels->size()) != data.frames()) {
    throw Error(ErrorCode::shape,
                std::string(op) + ": " + std::to_string(labels->size()) +
                    " target labels for " + std::to_string(data.frames()) +
                    " frames");
  }
}

}  // namespace

std::vector<int> pseudo_label(const NetworkParams& net, const FrameDataset& data) {
  require_classifier(net, "pseudo_label");
  require_frames(data, "pseudo_label");
  return argmax_rows(forward(net, data.features).output);
}

std::vector<int> pseudo_label(const NetworkParams& net, const EffectiveScale& s,
                              const FrameDataset& data) {
  require_classifier(net, "pseudo_label");
  require_frames(data, "pseudo_label");
  return argmax_rows(forward(net, s, data.features).output);
}

std::vector<int> pseudo_label(const NetworkParams& net, const TransformBank& bank,
                              const FrameDataset& data) {
  auto it = bank.transforms.find(0);
  if (it == bank.transforms.end()) {
    throw Error(ErrorCode::invalid_argument,
                "pseudo_label: bank has no speaker-independent cluster 0");
  }
  return pseudo_label(net, to_scale(it->second), data);
}

LhucTransform adapt(const NetworkParams& net, const FrameDataset& data,
                    const std::vector<int>* labels, const AdaptConfig& cfg) {
  net.validate();
  data.validate();
  require_frames(data, "adapt");
  if (!(cfg.lr > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "adapt: learning rate must be positive");
  }
  if (cfg.sweeps < 0) {
    throw Error(ErrorCode::invalid_argument, "adapt: negative sweep count");
  }
  if (cfg.batch_size < 1) {
    throw Error(ErrorCode::invalid_argument, "adapt: batch size must be at least 1");
  }
  std::vector<bool> enabled = cfg.layers_enabled;
  if (enabled.empty()) {
    enabled.assign(net.n_hidden(), true);
  } else if (static_cast<int>(enabled.size()) != net.n_hidden()) {
    throw Error(ErrorCode::invalid_argument,
                "adapt: " + std::to_string(enabled.size()) +
                    " layer flags for " + std::to_string(net.n_hidden()) +
                    " hidden layers");
  }
  const bool classify = net.output_kind == OutputKind::softmax_classifier;
  if (classify) check_labels_match(data, labels, "adapt");

  // A single working cluster; the shared weights are const throughout.
  TransformBank bank;
  bank.kind = cfg.kind;
  const int kCluster = 1;
  bank.transforms[kCluster] = init_transform(net, cfg.kind);

  const int n = data.frames();
  std::vector<int> all(n);
  for (int t = 0; t < n; ++t) all[t] = t;
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int stop = std::min(n, start + cfg.batch_size);
      const std::span<const int> chunk(all.data() + start,
                                       static_cast<std::size_t>(stop - start));
      FrameDataset batch = data.subset(chunk);
      if (classify && labels) {
        batch.labels.assign(labels->begin() + start, labels->begin() + stop);
      }
      const std::vector<int> routes(chunk.size(), kCluster);
      ForwardTrace tr = forward(net, bank, routes, batch.features);
      LossGrad lg = classify ? softmax_xent(tr.output, batch.labels)
                             : mse(tr.output, batch.targets);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorCode::numeric,
                    "adapt: non-finite loss in sweep " + std::to_string(sweep + 1) +
                        " at frame " + std::to_string(start));
      }
      Gradients g = backward(tr, net, &bank, lg.grad);
      LhucTransform& t = bank.transforms.at(kCluster);
      const std::vector<Vector>& ga = g.amp.at(kCluster);
      for (int l = 0; l < net.n_hidden(); ++l) {
        if (!enabled[l]) continue;
        for (std::size_t j = 0; j < t.amps[l].size(); ++j) {
          t.amps[l][j] -= cfg.lr * ga[l][j];
        }
      }
    }
  }
  return bank.transforms.at(kCluster);
}

Metrics evaluate(const NetworkParams& net, const FrameDataset& data) {
  net.validate();
  data.validate();
  require_frames(data, "evaluate");
  return metrics_from_trace(net, forward(net, data.features), data);
}

Metrics evaluate(const NetworkParams& net, const LhucTransform& t,
                 const FrameDataset& data) {
  net.validate();
  data.validate();
  require_frames(data, "evaluate");
  return metrics_from_trace(net, forward(net, t, data.features), data);
}

Metrics evaluate(const NetworkParams& net, const EffectiveScale& s,
                 const FrameDataset& data) {
  net.validate();
  data.validate();
  require_frames(data, "evaluate");
  return metrics_from_trace(net, forward(net, s, data.features), data);
}

TwoPassResult two_pass_adapt(const NetworkParams& net, const TransformBank* bank,
                             const FrameDataset& data, const AdaptConfig& cfg) {
  require_classifier(net, "two_pass_adapt");
  require_frames(data, "two_pass_adapt");
  TwoPassResult r;
  if (bank) {
    auto it = bank->transforms.find(0);
    if (it == bank->transforms.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "two_pass_adapt: bank has no speaker-independent cluster 0");
    }
    const EffectiveScale s0 = to_scale(it->second);
    r.unadapted = evaluate(net, s0, data);
    r.first_pass_labels =
        cfg.supervised ? data.labels : pseudo_label(net, s0, data);
  } else {
    r.unadapted = evaluate(net, data);
    r.first_pass_labels = cfg.supervised ? data.labels : pseudo_label(net, data);
  }
  r.transform = adapt(net, data, &r.first_pass_labels, cfg);
  r.adapted = evaluate(net, r.transform, data);
  return r;
}

Metrics one_shot_apply(const NetworkParams& net, const LhucTransform& from,
                       const FrameDataset& data) {
  return evaluate(net, from, data);
}

EffectiveScale interpolate(const EffectiveScale& s, const EffectiveScale& e,
                           double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "interpolate: alpha " + std::to_string(alpha) + " outside [0, 1]");
  }
  if (s.scale.size() != e.scale.size()) {
    throw Error(ErrorCode::shape,
                "interpolate: scales cover " + std::to_string(s.scale.size()) +
                    " vs " + std::to_string(e.scale.size()) + " hidden layers");
  }
  EffectiveScale out;
  for (std::size_t l = 0; l < s.scale.size(); ++l) {
    if (s.scale[l].size() != e.scale[l].size()) {
      throw Error(ErrorCode::shape,
                  "interpolate: layer " + std::to_string(l) + " has " +
                      std::to_string(s.scale[l].size()) + " vs " +
                      std::to_string(e.scale[l].size()) + " units");
    }
    Vector v(s.scale[l].size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = alpha * s.scale[l][j] + (1.0 - alpha) * e.scale[l][j];
    }
    out.scale.push_back(std::move(v));
  }
  return out;
}

FactorisedReport factorised_experiment(const NetworkParams& net,
                                       const FrameDataset& data, int clean_env,
                                       double alpha, const AdaptConfig& cfg) {
  require_classifier(net, "factorised_experiment");
  data.validate();
  require_frames(data, "factorised_experiment");
  if (!data.has_env()) {
    throw Error(ErrorCode::invalid_argument,
                "factorised_experiment: dataset has no environment ids");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "factorised_experiment: alpha " + std::to_string(alpha) +
                    " outside [0, 1]");
  }
  const std::vector<int> speakers = data.speakers();
  const std::vector<int> envs = data.environments();
  if (std::find(envs.begin(), envs.end(), clean_env) == envs.end()) {
    throw Error(ErrorCode::invalid_argument,
                "factorised_experiment: clean environment " +
                    std::to_string(clean_env) + " absent from dataset");
  }

  auto targets_for = [&](const FrameDataset& sub) {
    return cfg.supervised ? sub.labels : pseudo_label(net, sub);
  };

  // One speaker transform per speaker, estimated on clean-condition data.
  std::map<int, LhucTransform> speaker_tr;
  for (int s : speakers) {
    const std::vector<int> idx = data.frames_of_speaker_env(s, clean_env);
    if (idx.empty()) {
      throw Error(ErrorCode::invalid_argument,
                  "factorised_experiment: speaker " + std::to_string(s) +
                      " has no clean-environment frames");
    }
    const FrameDataset sub = data.subset(idx);
    const std::vector<int> tgt = targets_for(sub);
    speaker_tr.emplace(s, adapt(net, sub, &tgt, cfg));
  }

  FactorisedReport report;
  report.alpha = alpha;
  struct Acc {
    double err = 0.0, loss = 0.0;
    long long frames = 0;
    void add(const Metrics& m) {
      err += m.frame_error_rate * static_cast<double>(m.frames);
      loss += m.mean_loss * static_cast<double>(m.frames);
      frames += m.frames;
    }
    Metrics done() const {
      Metrics m;
      m.frames = frames;
      m.frame_error_rate = err / static_cast<double>(frames);
      m.mean_loss = loss / static_cast<double>(frames);
      return m;
    }
  };
  Acc a_un, a_s, a_e, a_i, a_j;

  for (int s : speakers) {
    for (int e : envs) {
      const std::vector<int> cond_idx = data.frames_of_speaker_env(s, e);
      if (cond_idx.empty()) continue;
      const FrameDataset cond = data.subset(cond_idx);

      // Environment material excludes the target speaker; with a single
      // speaker the exclusion would empty the subset, so fall back to the
      // full environment data.
      std::vector<int> env_idx;
      for (int t : data.frames_of_env(e)) {
        if (data.speaker_ids[t] != s) env_idx.push_back(t);
      }
      if (env_idx.empty()) env_idx = data.frames_of_env(e);
      const FrameDataset env_sub = data.subset(env_idx);
      const std::vector<int> env_tgt = targets_for(env_sub);
      const LhucTransform env_tr = adapt(net, env_sub, &env_tgt, cfg);

      const std::vector<int> joint_tgt = targets_for(cond);
      const LhucTransform joint_tr = adapt(net, cond, &joint_tgt, cfg);

      const LhucTransform& spk_tr = speaker_tr.at(s);
      const Metrics m_un = evaluate(net, cond);
      const Metrics m_s = evaluate(net, spk_tr, cond);
      const Metrics m_e = evaluate(net, env_tr, cond);
      const Metrics m_i = evaluate(
          net, interpolate(to_scale(spk_tr), to_scale(env_tr), alpha), cond);
      const Metrics m_j = evaluate(net, joint_tr, cond);

      a_un.add(m_un);
      a_s.add(m_s);
      a_e.add(m_e);
      a_i.add(m_i);
      a_j.add(m_j);
      report.conditions.push_back({s, e, m_un.frames, m_un.frame_error_rate,
                                   m_s.frame_error_rate, m_e.frame_error_rate,
                                   m_i.frame_error_rate, m_j.frame_error_rate});
    }
  }
  report.unadapted = a_un.done();
  report.speaker_only = a_s.done();
  report.env_only = a_e.done();
  report.interpolated = a_i.done();
  report.joint = a_j.done();
  return report;
}

}  // namespace lhuc
