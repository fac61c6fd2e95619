// src/harness/checkpoint.cpp
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

#include "harness/checkpoint.hpp"

#include <string>

#include "core/error.hpp"
#include "harness/binio.hpp"

namespace lhuc {

namespace {

std::uint8_t activation_code(Activation a) {
  return a == Activation::sigmoid ? 0 : 1;
}

Activation activation_from_code(std::uint8_t c) {
  switch (c) {
    case 0: return Activation::sigmoid;
    case 1: return Activation::linear;
    default:
      throw Error(ErrorCode::format,
                  "checkpoint has unknown activation code " + std::to_string(c));
  }
}

std::uint8_t output_code(OutputKind k) {
  return k == OutputKind::softmax_classifier ? 0 : 1;
}

OutputKind output_from_code(std::uint8_t c) {
  switch (c) {
    case 0: return OutputKind::softmax_classifier;
    case 1: return OutputKind::linear_regressor;
    default:
      throw Error(ErrorCode::format,
                  "checkpoint has unknown output kind code " + std::to_string(c));
  }
}

std::uint8_t reparam_code(ReparamKind k) {
  switch (k) {
    case ReparamKind::identity: return 0;
    case ReparamKind::exp: return 1;
    case ReparamKind::sigmoid2: return 2;
    case ReparamKind::relu: return 3;
  }
  throw Error(ErrorCode::internal, "unhandled reparam kind");
}

ReparamKind reparam_from_code(std::uint8_t c) {
  switch (c) {
    case 0: return ReparamKind::identity;
    case 1: return ReparamKind::exp;
    case 2: return ReparamKind::sigmoid2;
    case 3: return ReparamKind::relu;
    default:
      throw Error(ErrorCode::format,
                  "checkpoint has unknown reparam code " + std::to_string(c));
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ckpt.params.validate();
  binio::Writer w;
  w.raw(kCheckpointMagic, 8);
  w.u32(kCheckpointVersion);
  w.u8(activation_code(ckpt.params.hidden_activation));
  w.u8(output_code(ckpt.params.output_kind));
  w.u8(reparam_code(ckpt.kind));
  w.u8(ckpt.bank.has_value() ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(ckpt.params.layers.size()));
  for (const Layer& l : ckpt.params.layers) {
    w.u32(static_cast<std::uint32_t>(l.W.rows));
    w.u32(static_cast<std::uint32_t>(l.W.cols));
  }
  w.u64(ckpt.prov.config_hash);
  w.u64(ckpt.prov.seed);
  w.u32(static_cast<std::uint32_t>(ckpt.prov.epoch));
  for (const Layer& l : ckpt.params.layers) {
    w.f64s(l.W.data.data(), l.W.data.size());
    w.f64s(l.b.data(), l.b.size());
  }
  if (ckpt.bank.has_value()) {
    const TransformBank& bank = *ckpt.bank;
    w.u32(static_cast<std::uint32_t>(bank.transforms.size()));
    for (const auto& [id, t] : bank.transforms) {  // std::map: ascending ids
      w.i32(id);
      for (const Vector& amps : t.amps) {
        w.u32(static_cast<std::uint32_t>(amps.size()));
        w.f64s(amps.data(), amps.size());
      }
    }
  }
  w.seal();
  binio::write_file(path, w.bytes());
}

Checkpoint load_checkpoint(const std::string& path) {
  binio::Reader r(binio::read_file(path), "checkpoint");
  r.check_seal();

  char magic[8];
  r.raw(magic, 8);
  if (std::string(magic, 8) != kCheckpointMagic) {
    throw Error(ErrorCode::format, "not a checkpoint file: " + path);
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::format,
                "unsupported checkpoint version " + std::to_string(version) +
                    " (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ckpt;
  ckpt.params.hidden_activation = activation_from_code(r.u8());
  ckpt.params.output_kind = output_from_code(r.u8());
  ckpt.kind = reparam_from_code(r.u8());
  const bool has_bank = r.u8() != 0;

  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 1000) {
    throw Error(ErrorCode::format,
                "checkpoint has implausible layer count " +
                    std::to_string(n_layers));
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes(n_layers);
  for (auto& [rows, cols] : shapes) {
    rows = r.u32();
    cols = r.u32();
  }

  ckpt.prov.config_hash = r.u64();
  ckpt.prov.seed = r.u64();
  ckpt.prov.epoch = static_cast<int>(r.u32());

  for (const auto& [rows, cols] : shapes) {
    Layer l;
    l.W = Matrix(static_cast<int>(rows), static_cast<int>(cols));
    l.b = Vector(rows);
    r.f64s(l.W.data.data(), l.W.data.size());
    r.f64s(l.b.data(), l.b.size());
    ckpt.params.layers.push_back(std::move(l));
  }
  ckpt.params.validate();

  if (has_bank) {
    TransformBank bank;
    bank.kind = ckpt.kind;
    const std::uint32_t n_clusters = r.u32();
    int prev_id = 0;
    bool first = true;
    for (std::uint32_t c = 0; c < n_clusters; ++c) {
      const int id = r.i32();
      if (!first && id <= prev_id) {
        throw Error(ErrorCode::format,
                    "checkpoint bank cluster ids out of order");
      }
      first = false;
      prev_id = id;
      LhucTransform t;
      t.kind = ckpt.kind;
      for (int l = 0; l < ckpt.params.n_hidden(); ++l) {
        const std::uint32_t len = r.u32();
        if (static_cast<int>(len) != ckpt.params.hidden_width(l)) {
          throw Error(ErrorCode::format,
                      "checkpoint amplitude count disagrees with topology");
        }
        Vector amps(len);
        r.f64s(amps.data(), amps.size());
        t.amps.push_back(std::move(amps));
      }
      bank.transforms.emplace(id, std::move(t));
    }
    ckpt.bank = std::move(bank);
  }

  r.expect_end();
  return ckpt;
}

}  // namespace lhuc
