// src/core/synth.hpp
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
// Seeded synthetic tasks.  All generators are pure functions of their spec
// (and session salt): the same spec bit-reproduces the same dataset.

#ifndef LHUC_CORE_SYNTH_HPP_
#define LHUC_CORE_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "core/dataset.hpp"

namespace lhuc {

struct Bump {
  double center = 0.0;
  double width = 1.0;
  double height = 1.0;
};

// 1-d regression target: sum of Gaussian bumps evaluated at uniform random x
// positions, plus observation noise.
struct BumpSpec {
  int n_points = 200;
  double x_lo = -3.0;
  double x_hi = 3.0;
  std::vector<Bump> bumps;
  double noise_sd = 0.02;
  std::uint64_t seed = 0;
};

double bump_value(const BumpSpec& spec, double x);

FrameDataset gen_bump(const BumpSpec& spec);

// Two competing target functions mixed 50/50 by a per-frame seeded coin.
// Frames drawn from `a` are tagged speaker 1, frames from `b` speaker 2, and
// each speaker's subsequence is exactly gen_bump of that spec under a derived
// sub-seed with the realized count.
FrameDataset gen_mixture_bump(const BumpSpec& a, const BumpSpec& b, int n_total,
                              std::uint64_t seed);

struct SpeakerWarp {
  Matrix A;      // dim x dim, I + R with ||R||_F = warp_scale < 1, so invertible
  Vector shift;  // length dim, norm warp_scale
};

struct EnvModel {
  Vector offset;        // fixed additive component, norm = noise_sd
  double noise_sd = 0;  // white noise level
};

// Generative ground truth, kept so tests can build oracle classifiers.
struct MulticlusterTruth {
  Matrix class_means;  // n_classes x dim, mutually orthogonal directions
  std::map<int, SpeakerWarp> warps;
  std::vector<EnvModel> envs;
};

// Multi-speaker, multi-environment classification task.  Class means sit on a
// seeded orthogonal frame scaled by class_separation; each speaker applies an
// invertible affine warp to the class signal; each environment adds a fixed
// offset plus white noise.  Test speakers are disjoint from training speakers.
struct ClusterTaskSpec {
  int n_classes = 10;
  int feature_dim = 20;
  int n_speakers = 30;          // training speakers, ids 1..n
  int n_heldout_speakers = 20;  // test speakers, ids n+1..n+h
  int n_environments = 3;
  int frames_per_speaker_per_env = 500;
  int frames_per_segment = 50;
  double speaker_warp_scale = 0.5;  // must be < 1 to keep warps invertible
  std::vector<double> env_noise_sd = {0.0, 0.5, 1.0};
  double class_separation = 3.0;
  double label_corruption = 0.0;  // applied to training labels only
  std::uint64_t seed = 0;
};

struct MulticlusterData {
  FrameDataset train;
  FrameDataset test;
  MulticlusterTruth truth;
};

// `session` salts only the frame-level draws: the same spec with a different
// session keeps every speaker warp, class mean and environment model fixed
// and redraws the observed frames (a fresh recording session).
MulticlusterData gen_multicluster(const ClusterTaskSpec& spec,
                                  std::uint64_t session = 0);

// Each label is independently replaced, with the given probability, by a
// uniformly chosen *different* class.
std::vector<int> corrupt_labels(const std::vector<int>& labels, int n_classes,
                                double rate, std::uint64_t seed);

}  // namespace lhuc

#endif  // LHUC_CORE_SYNTH_HPP_
