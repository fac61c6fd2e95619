// src/harness/experiments.hpp
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
// Experiment execution.  run_experiment materializes the task, obtains a
// model (training one or loading a checkpoint), runs the named experiment,
// and writes its artifacts into the configured output directory:
//
//   resolved_config.json   complete effective config (defaults filled)
//   metrics.jsonl          line-delimited metric records
//   model.ckpt             train_si / train_sat only
//   train_curve.csv        train_si / train_sat only
//   per_speaker.csv        adapt / two_pass
//   fraction_sweep.csv     two_pass with a data-amount sweep
//   corruption_sweep.csv   two_pass with a target-quality sweep
//   layer_sweep.csv        two_pass with the layer sweep enabled
//   one_shot.csv           one_shot
//   factorised.csv         factorised (one block of rows per alpha)
//   bump_table.csv         bump_demo (x, target, si and adapted predictions)
//
// Runs are deterministic: the same config (hence the same resolved config)
// produces byte-identical artifact files.  On failure every file this run
// created is removed, so an output directory never holds partial results.
// Setting the environment variable LHUCLAB_VERBOSE to anything but "" or
// "0" enables progress lines on stderr; nothing else is ambient.

#ifndef LHUC_HARNESS_EXPERIMENTS_HPP_
#define LHUC_HARNESS_EXPERIMENTS_HPP_

#include <map>
#include <string>
#include <vector>

#include "harness/config.hpp"
#include "harness/metrics_log.hpp"

namespace lhuc {

struct RunResult {
  std::string output_dir;
  std::map<std::string, double> summary;
  std::vector<MetricRecord> records;  // what metrics.jsonl contains
};

RunResult run_experiment(const ExperimentConfig& cfg);

// Materializes the datasets a task config describes.  `test` has zero frames
// for task types without a held-out split (bump, mixture, file without a
// test path).
struct TaskData {
  FrameDataset train;
  FrameDataset test;
};

TaskData materialize_task(const TaskConfig& task);

// Writes the datasets a task spec describes and returns the created paths:
// <out_base>.train.lds and <out_base>.test.lds for tasks with a held-out
// split, <out_base>.lds otherwise.
std::vector<std::string> synth_generate(const TaskConfig& task,
                                        const std::string& out_base);

}  // namespace lhuc

#endif  // LHUC_HARNESS_EXPERIMENTS_HPP_
