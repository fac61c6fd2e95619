// src/harness/checkpoint.hpp
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
// Versioned binary model checkpoints.  Layout (all integers little-endian,
// reals IEEE-754 binary64 little-endian):
//
//   magic               8 bytes  "LHUCCKPT"
//   version             u32      currently 1
//   hidden_activation   u8       0 sigmoid, 1 linear
//   output_kind         u8       0 softmax classifier, 1 linear regressor
//   reparam_kind        u8       0 identity, 1 exp, 2 sigmoid2, 3 relu
//   has_bank            u8       0 or 1
//   n_layers            u32
//   per layer           u32 rows, u32 cols
//   config_hash         u64      FNV-1a-64 of the resolved config text
//   seed                u64
//   epoch               u32      best epoch of the producing run
//   per layer           f64[rows*cols] weights, f64[rows] biases
//   if has_bank:
//     n_clusters        u32
//     per cluster       i32 cluster id (ascending), then per hidden layer
//                       u32 amp count + f64[count] raw amplitudes
//   checksum            u64      FNV-1a-64 of every preceding byte
//
// A load either returns a fully validated checkpoint or throws; no partially
// populated model ever escapes.  Round-trips are bit-exact.

#ifndef LHUC_HARNESS_CHECKPOINT_HPP_
#define LHUC_HARNESS_CHECKPOINT_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "core/model.hpp"

namespace lhuc {

inline constexpr char kCheckpointMagic[9] = "LHUCCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int epoch = 0;
};

struct Checkpoint {
  NetworkParams params;
  ReparamKind kind = ReparamKind::exp;
  std::optional<TransformBank> bank;
  Provenance prov;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lhuc

#endif  // LHUC_HARNESS_CHECKPOINT_HPP_
