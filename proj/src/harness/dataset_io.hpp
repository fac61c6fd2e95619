// src/harness/dataset_io.hpp
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
// Dataset persistence.  Binary layout (integers little-endian, reals
// IEEE-754 binary64 little-endian):
//
//   magic        8 bytes  "LHUCDATA"
//   version      u32      currently 1
//   task         u8       0 classification, 1 regression
//   frames       u32
//   dim          u32      feature dimension
//   target_dim   u32      regression target width, 0 for classification
//   n_classes    u32      0 for regression
//   has_env      u8
//   features     f64[frames*dim], row-major
//   labels       i32[frames]            (classification only)
//   targets      f64[frames*target_dim] (regression only)
//   speaker_ids  i32[frames]
//   segment_ids  i32[frames]
//   env_ids      i32[frames]            (only when has_env)
//   checksum     u64      FNV-1a-64 of every preceding byte
//
// The text import path accepts comma-separated classification frames, one
// frame per line: feature values, then label, speaker id, segment id and
// environment id.  An environment id of -1 on every line means the dataset
// carries no environment tags.  Blank lines and lines starting with '#' are
// ignored.

#ifndef LHUC_HARNESS_DATASET_IO_HPP_
#define LHUC_HARNESS_DATASET_IO_HPP_

#include <cstdint>
#include <string>

#include "core/dataset.hpp"

namespace lhuc {

inline constexpr char kDatasetMagic[9] = "LHUCDATA";
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const std::string& path, const FrameDataset& data);
FrameDataset load_dataset(const std::string& path);

FrameDataset import_csv_dataset(const std::string& path);

}  // namespace lhuc

#endif  // LHUC_HARNESS_DATASET_IO_HPP_
