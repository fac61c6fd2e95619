// src/core/dataset.cpp
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

#include "core/dataset.hpp"

#include <algorithm>
#include <set>

#include "core/error.hpp"

namespace lhuc {

void FrameDataset::validate() const {
  const int n = frames();
  auto bad = [&](const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, "dataset: " + msg);
  };
  if (task == TaskKind::classification) {
    if (static_cast<int>(labels.size()) != n) bad("label count does not match frame count");
    if (n_classes < 1 && n > 0) bad("classification dataset with no classes");
    for (int t = 0; t < n; ++t) {
      if (labels[t] < 0 || labels[t] >= n_classes) {
        bad("label " + std::to_string(labels[t]) + " out of range at frame " +
            std::to_string(t));
      }
    }
  } else {
    if (targets.rows != n) bad("target count does not match frame count");
    if (!all_finite(targets)) bad("non-finite regression target");
  }
  if (static_cast<int>(speaker_ids.size()) != n) bad("speaker id count does not match frame count");
  if (static_cast<int>(segment_ids.size()) != n) bad("segment id count does not match frame count");
  if (!env_ids.empty() && static_cast<int>(env_ids.size()) != n) {
    bad("environment id count does not match frame count");
  }
  for (int t = 0; t < n; ++t) {
    if (speaker_ids[t] < 1) {
      bad("speaker id " + std::to_string(speaker_ids[t]) + " at frame " +
          std::to_string(t) + " (0 is reserved, ids start at 1)");
    }
    if (segment_ids[t] < 0) bad("negative segment id");
    if (!env_ids.empty() && env_ids[t] < 0) bad("negative environment id");
  }
  if (!all_finite(features)) bad("non-finite feature value");
}

FrameDataset FrameDataset::subset(std::span<const int> idx) const {
  FrameDataset out;
  out.task = task;
  out.n_classes = n_classes;
  out.features = Matrix(static_cast<int>(idx.size()), dim());
  if (task == TaskKind::regression) {
    out.targets = Matrix(static_cast<int>(idx.size()), targets.cols);
  }
  out.labels.reserve(task == TaskKind::classification ? idx.size() : 0);
  out.speaker_ids.reserve(idx.size());
  out.segment_ids.reserve(idx.size());
  if (has_env()) out.env_ids.reserve(idx.size());
  int row = 0;
  for (int t : idx) {
    if (t < 0 || t >= frames()) {
      throw Error(ErrorCode::invalid_argument,
                  "dataset subset: index " + std::to_string(t) +
                      " out of range for " + std::to_string(frames()) + " frames");
    }
    std::copy_n(features.row(t).data(), dim(), out.features.row(row).data());
    if (task == TaskKind::classification) {
      out.labels.push_back(labels[t]);
    } else {
      std::copy_n(targets.row(t).data(), targets.cols, out.targets.row(row).data());
    }
    out.speaker_ids.push_back(speaker_ids[t]);
    out.segment_ids.push_back(segment_ids[t]);
    if (has_env()) out.env_ids.push_back(env_ids[t]);
    ++row;
  }
  return out;
}

std::vector<int> FrameDataset::speakers() const {
  std::set<int> s(speaker_ids.begin(), speaker_ids.end());
  return {s.begin(), s.end()};
}

std::vector<int> FrameDataset::environments() const {
  std::set<int> s(env_ids.begin(), env_ids.end());
  return {s.begin(), s.end()};
}

std::vector<int> FrameDataset::frames_of_speaker(int speaker) const {
  std::vector<int> idx;
  for (int t = 0; t < frames(); ++t) {
    if (speaker_ids[t] == speaker) idx.push_back(t);
  }
  return idx;
}

std::vector<int> FrameDataset::frames_of_env(int env) const {
  std::vector<int> idx;
  for (int t = 0; t < frames(); ++t) {
    if (!env_ids.empty() && env_ids[t] == env) idx.push_back(t);
  }
  return idx;
}

std::vector<int> FrameDataset::frames_of_speaker_env(int speaker, int env) const {
  std::vector<int> idx;
  for (int t = 0; t < frames(); ++t) {
    if (speaker_ids[t] == speaker && !env_ids.empty() && env_ids[t] == env) {
      idx.push_back(t);
    }
  }
  return idx;
}

}  // namespace lhuc
