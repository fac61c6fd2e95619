// src/harness/config.hpp
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
// Experiment configuration: strict JSON in, fully resolved JSON out.
//
// Parsing is strict: any key the schema does not know is an error naming the
// full path of the offending key (e.g. "unknown config key: train.lrate"),
// so hyperparameter typos can never silently fall back to defaults.  Every
// optional key has its default taken from the corresponding module config
// struct; `resolved_config_json` renders the complete effective
// configuration (defaults filled in, keys alphabetical), and re-parsing that
// text reproduces the same ExperimentConfig.
//
// Experiment kinds and their sections:
//
//   train_si    model (req), train, task (req)
//   train_sat   model (req), train, sat, task (req)
//   adapt       model+train or checkpoint, adapt, task (req)
//   two_pass    model+train or checkpoint, adapt, sweeps, task (req)
//   one_shot    model+train or checkpoint, adapt, one_shot, task (req)
//   factorised  model+train or checkpoint, adapt, factorised, task (req)
//   bump_demo   bump (req)
//   gradcheck   gradcheck
//
// `adapt` runs supervised by default (it is the known-targets experiment);
// `two_pass` defaults to unsupervised first-pass targets.  All kinds share
// `kind`, `seed` and `output_dir`.

#ifndef LHUC_HARNESS_CONFIG_HPP_
#define LHUC_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/adapter.hpp"
#include "core/model.hpp"
#include "core/synth.hpp"
#include "core/trainer.hpp"

namespace lhuc {

enum class ExperimentKind {
  train_si,
  train_sat,
  adapt,
  two_pass,
  one_shot,
  factorised,
  bump_demo,
  gradcheck,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct TaskConfig {
  enum class Type { multicluster, bump, mixture, file };
  Type type = Type::multicluster;

  ClusterTaskSpec cluster;      // type == multicluster
  std::uint64_t session = 0;    // multicluster generation session salt

  BumpSpec bump;                // type == bump

  BumpSpec mixture_a, mixture_b;  // type == mixture
  int mixture_n = 400;
  std::uint64_t mixture_seed = 0;

  std::string train_path;       // type == file
  std::string test_path;        // optional
};

struct BumpDemoConfig {
  int hidden_units = 4;
  ReparamKind reparam = ReparamKind::identity;
  double train_lr = 0.2;
  int train_iters = 20000;
  double adapt_lr = 0.8;
  int adapt_sweeps = 4000;
  BumpSpec f1, f2;
};

struct SweepConfig {
  std::vector<double> data_fractions;    // adaptation-data-amount sweep
  std::vector<double> corruption_rates;  // target-quality sweep
  bool layer_sweep = false;              // adapt first k hidden layers sweep
};

struct OneShotConfig {
  std::uint64_t session_a = 1;
  std::uint64_t session_b = 2;
};

struct FactorisedConfig {
  std::vector<double> alphas = {0.5, 0.7};
  int clean_env = 0;
};

struct GradcheckConfig {
  int cases = 25;
};

struct ModelConfig {
  std::vector<int> dims;  // {input, hidden..., output}
  OutputKind output_kind = OutputKind::softmax_classifier;
  ReparamKind reparam = ReparamKind::exp;
  bool present = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::train_si;
  std::uint64_t seed = 0;
  std::string output_dir;

  ModelConfig model;
  std::string checkpoint;  // input model path; alternative to model+train

  TrainConfig train;
  SatConfig sat;
  AdaptConfig adapt;
  TaskConfig task;
  SweepConfig sweeps;
  OneShotConfig one_shot;
  FactorisedConfig factorised;
  GradcheckConfig gradcheck;
  BumpDemoConfig bump;
};

// Parses and validates strictly; `source` names the input in error messages.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& source);
ExperimentConfig load_experiment_config(const std::string& path);

// Parses a bare task object (the synth-gen spec file format).
TaskConfig parse_task_config(const std::string& json_text,
                             const std::string& source);

// The complete effective configuration as canonical JSON text: defaults
// filled in, keys alphabetical, two-space indent, trailing newline.
std::string resolved_config_json(const ExperimentConfig& cfg);

// FNV-1a-64 of resolved_config_json; stamped into checkpoint provenance.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace lhuc

#endif  // LHUC_HARNESS_CONFIG_HPP_
