// src/harness/dataset_io.cpp
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

#include "harness/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/error.hpp"
#include "harness/binio.hpp"

namespace lhuc {

void save_dataset(const std::string& path, const FrameDataset& data) {
  data.validate();
  binio::Writer w;
  w.raw(kDatasetMagic, 8);
  w.u32(kDatasetVersion);
  const bool classification = data.task == TaskKind::classification;
  w.u8(classification ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(data.frames()));
  w.u32(static_cast<std::uint32_t>(data.dim()));
  w.u32(classification ? 0 : static_cast<std::uint32_t>(data.targets.cols));
  w.u32(classification ? static_cast<std::uint32_t>(data.n_classes) : 0);
  w.u8(data.has_env() ? 1 : 0);
  w.f64s(data.features.data.data(), data.features.data.size());
  if (classification) {
    w.i32s(data.labels.data(), data.labels.size());
  } else {
    w.f64s(data.targets.data.data(), data.targets.data.size());
  }
  w.i32s(data.speaker_ids.data(), data.speaker_ids.size());
  w.i32s(data.segment_ids.data(), data.segment_ids.size());
  if (data.has_env()) {
    w.i32s(data.env_ids.data(), data.env_ids.size());
  }
  w.seal();
  binio::write_file(path, w.bytes());
}

FrameDataset load_dataset(const std::string& path) {
  binio::Reader r(binio::read_file(path), "dataset");
  r.check_seal();

  char magic[8];
  r.raw(magic, 8);
  if (std::string(magic, 8) != kDatasetMagic) {
    throw Error(ErrorCode::format, "not a dataset file: " + path);
  }
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw Error(ErrorCode::format,
                "unsupported dataset version " + std::to_string(version) +
                    " (expected " + std::to_string(kDatasetVersion) + ")");
  }

  const std::uint8_t task_code = r.u8();
  if (task_code > 1) {
    throw Error(ErrorCode::format,
                "dataset has unknown task code " + std::to_string(task_code));
  }
  FrameDataset d;
  d.task = task_code == 0 ? TaskKind::classification : TaskKind::regression;
  const std::uint32_t frames = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint32_t target_dim = r.u32();
  d.n_classes = static_cast<int>(r.u32());
  const bool has_env = r.u8() != 0;
  if (frames > (1u << 28) || dim == 0 || dim > (1u << 20)) {
    throw Error(ErrorCode::format, "dataset has implausible dimensions");
  }

  d.features = Matrix(static_cast<int>(frames), static_cast<int>(dim));
  r.f64s(d.features.data.data(), d.features.data.size());
  if (d.task == TaskKind::classification) {
    d.labels.resize(frames);
    r.i32s(d.labels.data(), d.labels.size());
  } else {
    d.targets = Matrix(static_cast<int>(frames), static_cast<int>(target_dim));
    r.f64s(d.targets.data.data(), d.targets.data.size());
  }
  d.speaker_ids.resize(frames);
  r.i32s(d.speaker_ids.data(), d.speaker_ids.size());
  d.segment_ids.resize(frames);
  r.i32s(d.segment_ids.data(), d.segment_ids.size());
  if (has_env) {
    d.env_ids.resize(frames);
    r.i32s(d.env_ids.data(), d.env_ids.size());
  }
  r.expect_end();
  d.validate();
  return d;
}

FrameDataset import_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open for reading: " + path);
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) {
        throw Error(ErrorCode::format, path + ":" + std::to_string(line_no) +
                                           ": empty field");
      }
      double v = 0.0;
      const char* cb = cell.data() + b;
      const char* ce = cell.data() + e + 1;
      const auto res = std::from_chars(cb, ce, v);
      if (res.ec != std::errc{} || res.ptr != ce) {
        throw Error(ErrorCode::format,
                    path + ":" + std::to_string(line_no) + ": bad number '" +
                        cell.substr(b, e - b + 1) + "'");
      }
      row.push_back(v);
    }
    if (row.size() < 5) {
      throw Error(ErrorCode::format,
                  path + ":" + std::to_string(line_no) +
                      ": expected at least 5 columns "
                      "(features..., label, speaker, segment, environment)");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw Error(ErrorCode::format,
                  path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " columns, got " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::format, path + ": no data rows");
  }

  const int frames = static_cast<int>(rows.size());
  const int dim = static_cast<int>(width) - 4;
  FrameDataset d;
  d.task = TaskKind::classification;
  d.features = Matrix(frames, dim);
  bool any_env = false;
  for (int t = 0; t < frames; ++t) {
    const std::vector<double>& row = rows[static_cast<std::size_t>(t)];
    for (int i = 0; i < dim; ++i) d.features(t, i) = row[static_cast<std::size_t>(i)];
    const auto as_int = [&](std::size_t col, const char* what) {
      const double v = row[col];
      const int iv = static_cast<int>(v);
      if (static_cast<double>(iv) != v) {
        throw Error(ErrorCode::format, path + ": non-integer " +
                                           std::string(what) + " in row " +
                                           std::to_string(t + 1));
      }
      return iv;
    };
    d.labels.push_back(as_int(width - 4, "label"));
    d.speaker_ids.push_back(as_int(width - 3, "speaker id"));
    d.segment_ids.push_back(as_int(width - 2, "segment id"));
    d.env_ids.push_back(as_int(width - 1, "environment id"));
    if (d.env_ids.back() != -1) any_env = true;
  }
  if (!any_env) {
    d.env_ids.clear();
  }
  d.n_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  d.validate();
  return d;
}

}  // namespace lhuc
