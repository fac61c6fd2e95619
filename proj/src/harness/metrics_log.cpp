// src/harness/metrics_log.cpp
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

#include "harness/metrics_log.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "core/error.hpp"
#include "json.hpp"

namespace lhuc {

std::string metric_to_line(const MetricRecord& rec) {
  nlohmann::json j;
  if (rec.cluster.has_value()) j["cluster"] = *rec.cluster;
  j["experiment"] = rec.experiment;
  j["metric"] = rec.metric;
  j["schema"] = kMetricsSchemaVersion;
  if (rec.step.has_value()) j["step"] = *rec.step;
  if (std::isfinite(rec.value)) {
    j["value"] = rec.value;
  } else {
    j["value"] = nullptr;
  }
  return j.dump();
}

MetricRecord metric_from_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format,
                std::string("bad metrics line: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::format, "metrics line is not an object");
  }
  if (!j.contains("schema") || !j["schema"].is_number_integer() ||
      j["schema"].get<int>() != kMetricsSchemaVersion) {
    throw Error(ErrorCode::format, "metrics line has missing or unsupported "
                                   "schema version");
  }
  MetricRecord rec;
  try {
    rec.experiment = j.at("experiment").get<std::string>();
    rec.metric = j.at("metric").get<std::string>();
    if (j.at("value").is_null()) {
      rec.value = std::numeric_limits<double>::quiet_NaN();
    } else {
      rec.value = j.at("value").get<double>();
    }
    if (j.contains("step")) rec.step = j["step"].get<int>();
    if (j.contains("cluster")) rec.cluster = j["cluster"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format,
                std::string("bad metrics line: ") + e.what());
  }
  return rec;
}

void write_metrics(const std::string& path,
                   const std::vector<MetricRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open for writing: " + path);
  }
  for (const MetricRecord& rec : records) {
    out << metric_to_line(rec) << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorCode::io, "write failed: " + path);
  }
}

std::vector<MetricRecord> read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open for reading: " + path);
  }
  std::vector<MetricRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(metric_from_line(line));
  }
  return records;
}

}  // namespace lhuc
