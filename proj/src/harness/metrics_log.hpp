// src/harness/metrics_log.hpp
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
// Line-delimited metrics records.  One JSON object per line with keys in
// alphabetical order and a schema version stamp, e.g.
//
//   {"cluster":7,"experiment":"two_pass","metric":"fer_adapted",
//    "schema":1,"step":3,"value":0.125}
//
// `step` and `cluster` are optional and omitted when absent.  Non-finite
// values serialize as JSON null and read back as quiet NaN (JSON has no
// representation for them).  Writing is whole-file and deterministic: the
// same records produce byte-identical files.

#ifndef LHUC_HARNESS_METRICS_LOG_HPP_
#define LHUC_HARNESS_METRICS_LOG_HPP_

#include <optional>
#include <string>
#include <vector>

namespace lhuc {

inline constexpr int kMetricsSchemaVersion = 1;

struct MetricRecord {
  std::string experiment;
  std::string metric;
  double value = 0.0;
  std::optional<int> step;     // epoch or sweep index
  std::optional<int> cluster;  // speaker/cluster id

  bool operator==(const MetricRecord&) const = default;
};

std::string metric_to_line(const MetricRecord& rec);
MetricRecord metric_from_line(const std::string& line);

void write_metrics(const std::string& path,
                   const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_metrics(const std::string& path);

}  // namespace lhuc

#endif  // LHUC_HARNESS_METRICS_LOG_HPP_
