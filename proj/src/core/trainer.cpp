// src/core/trainer.cpp
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

#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lhuc {

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::frame: return "frame";
    case Granularity::segment: return "segment";
    case Granularity::speaker: return "speaker";
  }
  return "?";
}

Granularity granularity_from_string(const std::string& name) {
  if (name == "frame") return Granularity::frame;
  if (name == "segment") return Granularity::segment;
  if (name == "speaker") return Granularity::speaker;
  throw Error(ErrorCode::config, "unknown routing granularity '" + name + "'");
}

namespace {

void check_sat_config(const SatConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "routing: gamma " + std::to_string(cfg.gamma) +
                    " outside [0, 1]");
  }
}

// Routes for the frames listed in `indices` (result aligned with the list).
// `salt` separates per-epoch frame-level redraws.
std::vector<int> draw_routes(const FrameDataset& data,
                             std::span<const int> indices, const SatConfig& cfg,
                             std::uint64_t salt) {
  check_sat_config(cfg);
  std::vector<int> routes(indices.size(), 0);
  if (cfg.granularity == Granularity::frame) {
    Rng rng = make_rng(derive_seed(cfg.seed, stream::kRoutes, salt));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      routes[i] = u(rng) < cfg.gamma ? 0 : data.speaker_ids[indices[i]];
    }
    return routes;
  }

  const bool by_segment = cfg.granularity == Granularity::segment;
  if (by_segment && data.segment_ids.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "routing: segment granularity requires segment ids");
  }
  // Unit id -> frame mass; segments must not span speakers, otherwise a
  // speaker-dependent unit route would be incoherent.
  std::map<int, long long> unit_mass;
  std::map<int, int> unit_speaker;
  for (int t : indices) {
    const int unit = by_segment ? data.segment_ids[t] : data.speaker_ids[t];
    unit_mass[unit] += 1;
    auto [it, fresh] = unit_speaker.emplace(unit, data.speaker_ids[t]);
    if (!fresh && by_segment && it->second != data.speaker_ids[t]) {
      throw Error(ErrorCode::invalid_argument,
                  "routing: segment " + std::to_string(unit) +
                      " spans more than one speaker");
    }
  }

  // Order units by a seeded random key, then take the prefix whose cumulative
  // frame mass lands closest to gamma.
  struct UnitKey {
    std::uint64_t key;
    int unit;
  };
  std::vector<UnitKey> order;
  order.reserve(unit_mass.size());
  Rng rng = make_rng(derive_seed(cfg.seed, stream::kRoutes, salt));
  for (const auto& [unit, mass] : unit_mass) {
    (void)mass;
    order.push_back({rng(), unit});
  }
  std::sort(order.begin(), order.end(), [](const UnitKey& a, const UnitKey& b) {
    return a.key != b.key ? a.key < b.key : a.unit < b.unit;
  });
  const double total = static_cast<double>(indices.size());
  double best_diff = std::abs(0.0 - cfg.gamma);
  std::size_t best_prefix = 0;
  double mass = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    mass += static_cast<double>(unit_mass.at(order[p].unit));
    const double diff = std::abs(mass / total - cfg.gamma);
    if (diff < best_diff) {
      best_diff = diff;
      best_prefix = p + 1;
    }
  }
  std::set<int> si_units;
  for (std::size_t p = 0; p < best_prefix; ++p) si_units.insert(order[p].unit);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int t = indices[i];
    const int unit = by_segment ? data.segment_ids[t] : data.speaker_ids[t];
    routes[i] = si_units.count(unit) ? 0 : data.speaker_ids[t];
  }
  return routes;
}

}  // namespace

RouteAssignment assign_routes(const FrameDataset& data, const SatConfig& cfg) {
  data.validate();
  std::vector<int> all(data.frames());
  std::iota(all.begin(), all.end(), 0);
  RouteAssignment out;
  out.routes = draw_routes(data, all, cfg, 0);
  long long si = 0;
  for (int r : out.routes) si += r == 0 ? 1 : 0;
  out.si_fraction = data.frames() == 0
                        ? 0.0
                        : static_cast<double>(si) / data.frames();
  return out;
}

NewbobDecision newbob_update(NewbobState& state, const NewbobConfig& cfg,
                             double cv_loss) {
  if (!std::isfinite(cv_loss)) {
    throw Error(ErrorCode::numeric, "newbob: non-finite CV loss");
  }
  if (!state.has_prev) {
    state.has_prev = true;
    state.best_cv = cv_loss;
    return NewbobDecision::keep_going;
  }
  const double denom = std::max(std::abs(state.best_cv), 1e-12);
  const double improvement = (state.best_cv - cv_loss) / denom;
  if (cv_loss < state.best_cv) state.best_cv = cv_loss;
  if (improvement >= cfg.ramp_threshold) return NewbobDecision::keep_going;
  if (improvement < cfg.stop_threshold && state.halvings > 0) {
    return NewbobDecision::stop;
  }
  ++state.halvings;
  state.lr *= 0.5;
  return NewbobDecision::halve_and_continue;
}

namespace {

LossGrad batch_loss_grad(const NetworkParams& params, const ForwardTrace& tr,
                         const FrameDataset& batch) {
  if (params.output_kind == OutputKind::softmax_classifier) {
    if (batch.task != TaskKind::classification) {
      throw Error(ErrorCode::invalid_argument,
                  "loss: classifier head on a regression dataset");
    }
    return softmax_xent(tr.output, batch.labels);
  }
  if (batch.task != TaskKind::regression) {
    throw Error(ErrorCode::invalid_argument,
                "loss: regression head on a classification dataset");
  }
  return mse(tr.output, batch.targets);
}

void check_model_data(const NetworkParams& params, const FrameDataset& data) {
  if (data.dim() != params.input_dim()) {
    throw Error(ErrorCode::shape,
                "model expects " + std::to_string(params.input_dim()) +
                    " features, dataset has " + std::to_string(data.dim()));
  }
  if (params.output_kind == OutputKind::softmax_classifier &&
      data.task == TaskKind::classification &&
      data.n_classes != params.output_dim()) {
    throw Error(ErrorCode::shape,
                "model has " + std::to_string(params.output_dim()) +
                    " outputs, dataset has " + std::to_string(data.n_classes) +
                    " classes");
  }
  if (params.output_kind == OutputKind::linear_regressor &&
      data.task == TaskKind::regression &&
      data.targets.cols != params.output_dim()) {
    throw Error(ErrorCode::shape,
                "model has " + std::to_string(params.output_dim()) +
                    " outputs, dataset targets have " +
                    std::to_string(data.targets.cols) + " dims");
  }
}

}  // namespace

double sgd_step(NetworkParams& params, TransformBank* bank,
                const FrameDataset& batch, std::span<const int> routes,
                double lr) {
  if (batch.frames() == 0) {
    throw Error(ErrorCode::invalid_argument, "sgd_step: empty batch");
  }
  ForwardTrace tr = bank ? forward(params, *bank, routes, batch.features)
                         : forward(params, batch.features);
  LossGrad lg = batch_loss_grad(params, tr, batch);
  Gradients g = backward(tr, params, bank, lg.grad);
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    Layer& l = params.layers[k];
    const Layer& gl = g.theta[k];
    for (std::size_t i = 0; i < l.W.data.size(); ++i) {
      l.W.data[i] -= lr * gl.W.data[i];
    }
    for (std::size_t i = 0; i < l.b.size(); ++i) l.b[i] -= lr * gl.b[i];
  }
  if (bank) {
    const std::set<int> routed(routes.begin(), routes.end());
    for (int c : routed) {
      LhucTransform& t = bank->transforms.at(c);
      const std::vector<Vector>& ga = g.amp.at(c);
      for (std::size_t l = 0; l < t.amps.size(); ++l) {
        for (std::size_t j = 0; j < t.amps[l].size(); ++j) {
          t.amps[l][j] -= lr * ga[l][j];
        }
      }
    }
  }
  return lg.loss;
}

double mean_loss(const NetworkParams& params, const FrameDataset& data) {
  ForwardTrace tr = forward(params, data.features);
  return batch_loss_grad(params, tr, data).loss;
}

double mean_loss(const NetworkParams& params, const TransformBank& bank,
                 std::span<const int> routes, const FrameDataset& data) {
  ForwardTrace tr = forward(params, bank, routes, data.features);
  return batch_loss_grad(params, tr, data).loss;
}

namespace {

struct LoopResult {
  NetworkParams params;
  TransformBank bank;
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_cv = std::numeric_limits<double>::quiet_NaN();
};

void check_train_config(const TrainConfig& cfg) {
  auto bad = [](const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, "train config: " + msg);
  };
  if (!(cfg.initial_lr > 0.0)) bad("learning rate must be positive");
  if (cfg.batch_size < 1) bad("batch size must be at least 1");
  if (cfg.max_epochs < 0) bad("negative epoch count");
  if (!(cfg.newbob.ramp_threshold > 0.0)) bad("ramp threshold must be positive");
  if (!(cfg.newbob.stop_threshold > 0.0) ||
      cfg.newbob.stop_threshold > cfg.newbob.ramp_threshold) {
    bad("stop threshold must be in (0, ramp threshold]");
  }
  if (cfg.newbob.holdout_fraction < 0.0 || cfg.newbob.holdout_fraction >= 1.0) {
    bad("holdout fraction must be in [0, 1)");
  }
}

// Shared epoch loop.  `sat` null trains speaker-independent; otherwise a bank
// over the dataset's speakers is trained jointly with the shared weights.
LoopResult train_loop(const FrameDataset& data, const NetworkParams& init,
                      const TrainConfig& cfg, const SatConfig* sat,
                      ReparamKind kind) {
  data.validate();
  init.validate();
  check_train_config(cfg);
  check_model_data(init, data);
  if (data.frames() == 0) {
    throw Error(ErrorCode::invalid_argument, "train: empty dataset");
  }

  LoopResult res;
  res.params = init;
  if (sat) {
    check_sat_config(*sat);
    const std::vector<int> spk = data.speakers();
    res.bank = init_bank(init, kind, spk);
  }
  if (cfg.max_epochs == 0) return res;

  // Seeded holdout split; the CV block never sees an update.
  const int n = data.frames();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  {
    Rng rng = make_rng(derive_seed(cfg.seed, stream::kCvSplit));
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  int cv_n = static_cast<int>(std::llround(cfg.newbob.holdout_fraction * n));
  cv_n = std::min(cv_n, n - 1);
  std::vector<int> train_idx(idx.begin(), idx.end() - cv_n);
  std::vector<int> cv_idx(idx.end() - cv_n, idx.end());
  FrameDataset cv_data;
  if (cv_n > 0) cv_data = data.subset(cv_idx);
  const std::vector<int> cv_si_routes(cv_n, 0);

  NetworkParams params = init;
  TransformBank bank = res.bank;
  NewbobState nb;
  nb.lr = cfg.initial_lr;
  NetworkParams best_params = params;
  TransformBank best_bank = bank;
  double best_cv = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  std::vector<int> fixed_routes;  // dataset-frame-indexed; unit granularities
  if (sat && sat->granularity != Granularity::frame) {
    const std::vector<int> drawn = draw_routes(data, train_idx, *sat, 0);
    fixed_routes.assign(n, 0);
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      fixed_routes[train_idx[i]] = drawn[i];
    }
  }

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<int> order = train_idx;
    {
      Rng rng = make_rng(derive_seed(cfg.seed, stream::kEpochShuffle, epoch));
      std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<int> epoch_routes;  // dataset-frame-indexed
    if (sat) {
      if (sat->granularity == Granularity::frame) {
        const std::vector<int> drawn = draw_routes(data, train_idx, *sat, epoch);
        epoch_routes.assign(n, 0);
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
          epoch_routes[train_idx[i]] = drawn[i];
        }
      } else {
        epoch_routes = fixed_routes;
      }
    }

    const double epoch_lr = nb.lr;
    double loss_sum = 0.0;
    long long loss_frames = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const int> chunk(order.data() + start, stop - start);
      FrameDataset batch = data.subset(chunk);
      std::vector<int> batch_routes;
      if (sat) {
        batch_routes.reserve(chunk.size());
        for (int t : chunk) batch_routes.push_back(epoch_routes[t]);
      }
      const double loss = sgd_step(params, sat ? &bank : nullptr, batch,
                                   batch_routes, epoch_lr);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::numeric,
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch starting at frame " + std::to_string(start));
      }
      loss_sum += loss * static_cast<double>(chunk.size());
      loss_frames += static_cast<long long>(chunk.size());
    }
    const double train_loss = loss_sum / static_cast<double>(loss_frames);
    double cv_loss = train_loss;
    if (cv_n > 0) {
      cv_loss = sat ? mean_loss(params, bank, cv_si_routes, cv_data)
                    : mean_loss(params, cv_data);
    }
    if (!std::isfinite(cv_loss)) {
      throw Error(ErrorCode::numeric,
                  "train: non-finite CV loss at epoch " + std::to_string(epoch));
    }
    res.curve.push_back({epoch, epoch_lr, train_loss, cv_loss});
    if (cv_loss < best_cv) {
      best_cv = cv_loss;
      best_params = params;
      best_bank = bank;
      best_epoch = epoch;
    }
    if (newbob_update(nb, cfg.newbob, cv_loss) == NewbobDecision::stop) break;
  }

  res.params = std::move(best_params);
  res.bank = std::move(best_bank);
  res.best_epoch = best_epoch;
  res.best_cv = best_cv;
  return res;
}

}  // namespace

TrainResult train_si(const FrameDataset& data, const NetworkParams& init,
                     const TrainConfig& cfg) {
  LoopResult r = train_loop(data, init, cfg, nullptr, ReparamKind::exp);
  TrainResult out;
  out.params = std::move(r.params);
  out.curve = std::move(r.curve);
  out.best_epoch = r.best_epoch;
  out.best_cv = r.best_cv;
  return out;
}

SatTrainResult train_sat(const FrameDataset& data, const NetworkParams& init,
                         const TrainConfig& cfg, const SatConfig& sat,
                         ReparamKind kind) {
  LoopResult r = train_loop(data, init, cfg, &sat, kind);
  SatTrainResult out;
  out.params = std::move(r.params);
  out.bank = std::move(r.bank);
  out.curve = std::move(r.curve);
  out.best_epoch = r.best_epoch;
  out.best_cv = r.best_cv;
  return out;
}

}  // namespace lhuc
