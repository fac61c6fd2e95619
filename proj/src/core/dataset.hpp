// src/core/dataset.hpp
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

#ifndef LHUC_CORE_DATASET_HPP_
#define LHUC_CORE_DATASET_HPP_

#include <span>
#include <vector>

#include "core/tensor.hpp"

namespace lhuc {

enum class TaskKind { classification, regression };

// A flat frame-level dataset.  Every frame carries a speaker id and a segment
// id; environment ids are optional.  Speaker id 0 is reserved for the
// speaker-independent cluster and never tags a real frame.
struct FrameDataset {
  TaskKind task = TaskKind::classification;
  Matrix features;              // frames x dim
  std::vector<int> labels;      // classification: frames entries in [0, n_classes)
  Matrix targets;               // regression: frames x target_dim
  std::vector<int> speaker_ids;  // frames entries, >= 1
  std::vector<int> segment_ids;  // frames entries
  std::vector<int> env_ids;      // frames entries or empty
  int n_classes = 0;

  int frames() const { return features.rows; }
  int dim() const { return features.cols; }
  bool has_env() const { return !env_ids.empty(); }

  // Throws ErrorCode::invalid_argument on any structural inconsistency.
  void validate() const;

  FrameDataset subset(std::span<const int> idx) const;

  std::vector<int> speakers() const;      // sorted unique speaker ids
  std::vector<int> environments() const;  // sorted unique env ids

  std::vector<int> frames_of_speaker(int speaker) const;
  std::vector<int> frames_of_env(int env) const;
  std::vector<int> frames_of_speaker_env(int speaker, int env) const;
};

}  // namespace lhuc

#endif  // LHUC_CORE_DATASET_HPP_
