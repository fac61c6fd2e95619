// src/core/trainer.hpp
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
// Mini-batch SGD training, speaker-independent and speaker-adaptive.  The
// speaker-adaptive variant trains a transform bank jointly with the shared
// weights: each frame is routed either to its speaker's transform or to the
// reserved speaker-independent transform (cluster 0), with the
// speaker-independent probability given by gamma.

#ifndef LHUC_CORE_TRAINER_HPP_
#define LHUC_CORE_TRAINER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "core/dataset.hpp"
#include "core/model.hpp"

namespace lhuc {

struct NewbobConfig {
  double ramp_threshold = 0.005;   // relative CV improvement to keep the lr
  double stop_threshold = 0.0005;  // below this (after a halving) training stops
  double holdout_fraction = 0.1;   // fraction of frames held out for CV
};

struct TrainConfig {
  double initial_lr = 0.08;
  int batch_size = 32;
  int max_epochs = 20;
  NewbobConfig newbob;
  std::uint64_t seed = 0;
};

enum class Granularity { frame, segment, speaker };

const char* to_string(Granularity g);
Granularity granularity_from_string(const std::string& name);

struct SatConfig {
  double gamma = 0.5;  // probability a unit is routed speaker-independent
  Granularity granularity = Granularity::frame;
  std::uint64_t seed = 0;
};

struct RouteAssignment {
  std::vector<int> routes;   // per frame: 0 or the frame's own speaker id
  double si_fraction = 0.0;  // realized frame-weighted SI mass
};

// Draws routes for every frame of the dataset.  Frame granularity flips an
// independent coin per frame; segment and speaker granularity pick whole
// units so that the realized frame-weighted SI mass is as close to gamma as
// unit boundaries allow.
RouteAssignment assign_routes(const FrameDataset& data, const SatConfig& cfg);

enum class NewbobDecision { keep_going, halve_and_continue, stop };

struct NewbobState {
  double lr = 0.0;
  double best_cv = 0.0;
  int halvings = 0;
  bool has_prev = false;
};

// Applies one CV reading to the schedule: relative improvement at or above
// ramp_threshold keeps the lr, below it the lr halves, and below
// stop_threshold after at least one halving training stops.
NewbobDecision newbob_update(NewbobState& state, const NewbobConfig& cfg,
                             double cv_loss);

// One forward/backward/update on a batch.  With a bank, routed clusters'
// amplitudes update along with the shared weights; clusters not routed in the
// batch are untouched bit-exactly.  Returns the batch loss (before update).
double sgd_step(NetworkParams& params, TransformBank* bank,
                const FrameDataset& batch, std::span<const int> routes,
                double lr);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double cv_loss = 0.0;
};

struct TrainResult {
  NetworkParams params;  // parameters at the best CV loss
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_cv = 0.0;
};

TrainResult train_si(const FrameDataset& data, const NetworkParams& init,
                     const TrainConfig& cfg);

struct SatTrainResult {
  NetworkParams params;
  TransformBank bank;  // cluster 0 plus one cluster per training speaker
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_cv = 0.0;
};

// CV loss is always measured in speaker-independent mode (cluster 0).
SatTrainResult train_sat(const FrameDataset& data, const NetworkParams& init,
                         const TrainConfig& cfg, const SatConfig& sat,
                         ReparamKind kind);

// Mean loss of the model on a dataset (no update); used for CV readings.
double mean_loss(const NetworkParams& params, const FrameDataset& data);
double mean_loss(const NetworkParams& params, const TransformBank& bank,
                 std::span<const int> routes, const FrameDataset& data);

}  // namespace lhuc

#endif  // LHUC_CORE_TRAINER_HPP_
