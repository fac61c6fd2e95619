// src/harness/config.cpp
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

#include "harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "harness/binio.hpp"
#include "json.hpp"

namespace lhuc {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::config, msg);
}

// Strict view over one JSON object: every key must be consumed by a typed
// getter, and finish() reports the first unconsumed key by its full path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      config_error("config key " + (path_.empty() ? "<root>" : path_) +
                   ": expected an object");
    }
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* take(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
      config_error("config key " + key_path(key) + ": expected a number");
    }
    return v->get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      config_error("config key " + key_path(key) + ": expected an integer");
    }
    return v->get<int>();
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned() &&
        !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      config_error("config key " + key_path(key) +
                   ": expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) {
      config_error("config key " + key_path(key) + ": expected a boolean");
    }
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
      config_error("config key " + key_path(key) + ": expected a string");
    }
    return v->get<std::string>();
  }

  std::string required_string(const std::string& key) {
    if (!has(key)) {
      config_error("missing config key: " + key_path(key));
    }
    return string(key, "");
  }

  std::vector<double> number_array(const std::string& key,
                                   std::vector<double> fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) {
      config_error("config key " + key_path(key) + ": expected an array");
    }
    std::vector<double> out;
    for (const json& e : *v) {
      if (!e.is_number()) {
        config_error("config key " + key_path(key) +
                     ": expected an array of numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integer_array(const std::string& key,
                                 std::vector<int> fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) {
      config_error("config key " + key_path(key) + ": expected an array");
    }
    std::vector<int> out;
    for (const json& e : *v) {
      if (!e.is_number_integer() && !e.is_number_unsigned()) {
        config_error("config key " + key_path(key) +
                     ": expected an array of integers");
      }
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::vector<bool> boolean_array(const std::string& key,
                                  std::vector<bool> fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) {
      config_error("config key " + key_path(key) + ": expected an array");
    }
    std::vector<bool> out;
    for (const json& e : *v) {
      if (!e.is_boolean()) {
        config_error("config key " + key_path(key) +
                     ": expected an array of booleans");
      }
      out.push_back(e.get<bool>());
    }
    return out;
  }

  // Consumes a nested object; the returned view must also be finished.
  const json* object(const std::string& key) {
    const json* v = take(key);
    if (v == nullptr) return nullptr;
    if (!v->is_object()) {
      config_error("config key " + key_path(key) + ": expected an object");
    }
    return v;
  }

  const json* array(const std::string& key) {
    const json* v = take(key);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) {
      config_error("config key " + key_path(key) + ": expected an array");
    }
    return v;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) {
        config_error("unknown config key: " + key_path(item.key()));
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

OutputKind output_kind_from_string(const std::string& name,
                                   const std::string& path) {
  if (name == "classifier") return OutputKind::softmax_classifier;
  if (name == "regressor") return OutputKind::linear_regressor;
  config_error("config key " + path +
               ": expected \"classifier\" or \"regressor\", got \"" + name +
               "\"");
}

const char* to_string(OutputKind k) {
  return k == OutputKind::softmax_classifier ? "classifier" : "regressor";
}

ReparamKind parse_reparam(Obj& o, const std::string& key, ReparamKind fallback) {
  if (!o.has(key)) return fallback;
  const std::string name = o.string(key, "");
  try {
    return reparam_kind_from_string(name);
  } catch (const Error&) {
    config_error("config key " + o.key_path(key) +
                 ": unknown reparametrisation \"" + name + "\"");
  }
}

BumpSpec parse_bump_spec(const json& j, const std::string& path) {
  Obj o(j, path);
  BumpSpec spec;
  spec.n_points = o.integer("n_points", spec.n_points);
  spec.x_lo = o.number("x_lo", spec.x_lo);
  spec.x_hi = o.number("x_hi", spec.x_hi);
  spec.noise_sd = o.number("noise_sd", spec.noise_sd);
  spec.seed = o.u64("seed", spec.seed);
  if (const json* arr = o.array("bumps")) {
    int i = 0;
    for (const json& e : *arr) {
      Obj b(e, path + ".bumps[" + std::to_string(i++) + "]");
      Bump bump;
      bump.center = b.number("center", bump.center);
      bump.width = b.number("width", bump.width);
      bump.height = b.number("height", bump.height);
      b.finish();
      spec.bumps.push_back(bump);
    }
  }
  o.finish();
  if (spec.n_points < 2) {
    config_error("config key " + path + ".n_points: must be at least 2");
  }
  if (!(spec.x_hi > spec.x_lo)) {
    config_error("config key " + path + ": x_hi must exceed x_lo");
  }
  if (spec.noise_sd < 0.0) {
    config_error("config key " + path + ".noise_sd: must be non-negative");
  }
  if (spec.bumps.empty()) {
    config_error("config key " + path + ".bumps: must list at least one bump");
  }
  for (std::size_t i = 0; i < spec.bumps.size(); ++i) {
    if (!(spec.bumps[i].width > 0.0)) {
      config_error("config key " + path + ".bumps[" + std::to_string(i) +
                   "].width: must be positive");
    }
  }
  return spec;
}

json bump_spec_json(const BumpSpec& spec) {
  json j;
  j["n_points"] = spec.n_points;
  j["x_lo"] = spec.x_lo;
  j["x_hi"] = spec.x_hi;
  j["noise_sd"] = spec.noise_sd;
  j["seed"] = spec.seed;
  json bumps = json::array();
  for (const Bump& b : spec.bumps) {
    bumps.push_back({{"center", b.center}, {"width", b.width}, {"height", b.height}});
  }
  j["bumps"] = bumps;
  return j;
}

ClusterTaskSpec parse_cluster_spec(Obj& o, const std::string& path) {
  ClusterTaskSpec spec;
  spec.n_classes = o.integer("n_classes", spec.n_classes);
  spec.feature_dim = o.integer("feature_dim", spec.feature_dim);
  spec.n_speakers = o.integer("n_speakers", spec.n_speakers);
  spec.n_heldout_speakers =
      o.integer("n_heldout_speakers", spec.n_heldout_speakers);
  spec.n_environments = o.integer("n_environments", spec.n_environments);
  spec.frames_per_speaker_per_env =
      o.integer("frames_per_speaker_per_env", spec.frames_per_speaker_per_env);
  spec.frames_per_segment =
      o.integer("frames_per_segment", spec.frames_per_segment);
  spec.speaker_warp_scale =
      o.number("speaker_warp_scale", spec.speaker_warp_scale);
  spec.env_noise_sd = o.number_array("env_noise_sd", spec.env_noise_sd);
  spec.class_separation = o.number("class_separation", spec.class_separation);
  spec.label_corruption = o.number("label_corruption", spec.label_corruption);
  spec.seed = o.u64("seed", spec.seed);

  if (spec.n_classes < 2) {
    config_error("config key " + path + ".n_classes: must be at least 2");
  }
  if (spec.feature_dim < 1 || spec.n_speakers < 1 ||
      spec.n_heldout_speakers < 1 || spec.n_environments < 1 ||
      spec.frames_per_speaker_per_env < 1 || spec.frames_per_segment < 1) {
    config_error("config key " + path + ": counts must be positive");
  }
  if (spec.speaker_warp_scale < 0.0 || spec.speaker_warp_scale >= 1.0) {
    config_error("config key " + path +
                 ".speaker_warp_scale: must lie in [0, 1)");
  }
  if (static_cast<int>(spec.env_noise_sd.size()) != spec.n_environments) {
    config_error("config key " + path +
                 ".env_noise_sd: must list one level per environment");
  }
  for (double sd : spec.env_noise_sd) {
    if (sd < 0.0) {
      config_error("config key " + path +
                   ".env_noise_sd: levels must be non-negative");
    }
  }
  if (!(spec.class_separation > 0.0)) {
    config_error("config key " + path +
                 ".class_separation: must be positive");
  }
  if (spec.label_corruption < 0.0 || spec.label_corruption >= 1.0) {
    config_error("config key " + path +
                 ".label_corruption: must lie in [0, 1)");
  }
  return spec;
}

json cluster_spec_json(const ClusterTaskSpec& spec) {
  json j;
  j["n_classes"] = spec.n_classes;
  j["feature_dim"] = spec.feature_dim;
  j["n_speakers"] = spec.n_speakers;
  j["n_heldout_speakers"] = spec.n_heldout_speakers;
  j["n_environments"] = spec.n_environments;
  j["frames_per_speaker_per_env"] = spec.frames_per_speaker_per_env;
  j["frames_per_segment"] = spec.frames_per_segment;
  j["speaker_warp_scale"] = spec.speaker_warp_scale;
  j["env_noise_sd"] = spec.env_noise_sd;
  j["class_separation"] = spec.class_separation;
  j["label_corruption"] = spec.label_corruption;
  j["seed"] = spec.seed;
  return j;
}

TaskConfig parse_task(const json& j, const std::string& path) {
  Obj o(j, path);
  TaskConfig task;
  const std::string type = o.required_string("type");
  if (type == "multicluster") {
    task.type = TaskConfig::Type::multicluster;
    task.session = o.u64("session", task.session);
    task.cluster = parse_cluster_spec(o, path);
  } else if (type == "bump") {
    task.type = TaskConfig::Type::bump;
    // Re-parse the whole object as a bump spec, minus the type tag; the bump
    // parse is itself strict, so no separate finish() is needed here.
    json copy = j;
    copy.erase("type");
    task.bump = parse_bump_spec(copy, path);
    return task;
  } else if (type == "mixture") {
    task.type = TaskConfig::Type::mixture;
    if (const json* a = o.object("a")) {
      task.mixture_a = parse_bump_spec(*a, path + ".a");
    } else {
      config_error("missing config key: " + path + ".a");
    }
    if (const json* b = o.object("b")) {
      task.mixture_b = parse_bump_spec(*b, path + ".b");
    } else {
      config_error("missing config key: " + path + ".b");
    }
    task.mixture_n = o.integer("n_total", task.mixture_n);
    task.mixture_seed = o.u64("seed", task.mixture_seed);
    if (task.mixture_n < 2) {
      config_error("config key " + path + ".n_total: must be at least 2");
    }
  } else if (type == "file") {
    task.type = TaskConfig::Type::file;
    task.train_path = o.required_string("train_path");
    task.test_path = o.string("test_path", "");
    if (task.train_path.empty()) {
      config_error("config key " + path + ".train_path: must not be empty");
    }
  } else {
    config_error("config key " + path + ".type: unknown task type \"" + type +
                 "\"");
  }
  o.finish();
  return task;
}

json task_json(const TaskConfig& task) {
  json j;
  switch (task.type) {
    case TaskConfig::Type::multicluster:
      j = cluster_spec_json(task.cluster);
      j["type"] = "multicluster";
      j["session"] = task.session;
      break;
    case TaskConfig::Type::bump:
      j = bump_spec_json(task.bump);
      j["type"] = "bump";
      break;
    case TaskConfig::Type::mixture:
      j["type"] = "mixture";
      j["a"] = bump_spec_json(task.mixture_a);
      j["b"] = bump_spec_json(task.mixture_b);
      j["n_total"] = task.mixture_n;
      j["seed"] = task.mixture_seed;
      break;
    case TaskConfig::Type::file:
      j["type"] = "file";
      j["train_path"] = task.train_path;
      if (!task.test_path.empty()) j["test_path"] = task.test_path;
      break;
  }
  return j;
}

ModelConfig parse_model(const json& j, const std::string& path) {
  Obj o(j, path);
  ModelConfig model;
  model.present = true;
  model.dims = o.integer_array("dims", {});
  if (o.has("output")) {
    model.output_kind =
        output_kind_from_string(o.string("output", ""), path + ".output");
  }
  model.reparam = parse_reparam(o, "reparam", model.reparam);
  o.finish();
  if (model.dims.size() < 2) {
    config_error("config key " + path +
                 ".dims: must list input, hidden and output sizes");
  }
  for (int d : model.dims) {
    if (d < 1) {
      config_error("config key " + path + ".dims: sizes must be positive");
    }
  }
  return model;
}

TrainConfig parse_train(const json& j, const std::string& path,
                        std::uint64_t experiment_seed) {
  Obj o(j, path);
  TrainConfig cfg;
  cfg.seed = experiment_seed;
  cfg.initial_lr = o.number("lr", cfg.initial_lr);
  cfg.batch_size = o.integer("batch_size", cfg.batch_size);
  cfg.max_epochs = o.integer("max_epochs", cfg.max_epochs);
  cfg.newbob.ramp_threshold =
      o.number("ramp_threshold", cfg.newbob.ramp_threshold);
  cfg.newbob.stop_threshold =
      o.number("stop_threshold", cfg.newbob.stop_threshold);
  cfg.newbob.holdout_fraction =
      o.number("holdout_fraction", cfg.newbob.holdout_fraction);
  o.finish();
  if (!(cfg.initial_lr > 0.0)) {
    config_error("config key " + path + ".lr: must be positive");
  }
  if (cfg.batch_size < 1) {
    config_error("config key " + path + ".batch_size: must be at least 1");
  }
  if (cfg.max_epochs < 1) {
    config_error("config key " + path + ".max_epochs: must be at least 1");
  }
  if (!(cfg.newbob.ramp_threshold > 0.0)) {
    config_error("config key " + path + ".ramp_threshold: must be positive");
  }
  if (!(cfg.newbob.stop_threshold > 0.0) ||
      cfg.newbob.stop_threshold > cfg.newbob.ramp_threshold) {
    config_error("config key " + path +
                 ".stop_threshold: must lie in (0, ramp_threshold]");
  }
  if (cfg.newbob.holdout_fraction < 0.0 || cfg.newbob.holdout_fraction >= 1.0) {
    config_error("config key " + path +
                 ".holdout_fraction: must lie in [0, 1)");
  }
  return cfg;
}

SatConfig parse_sat(const json& j, const std::string& path,
                    std::uint64_t experiment_seed) {
  Obj o(j, path);
  SatConfig cfg;
  cfg.seed = experiment_seed;
  cfg.gamma = o.number("gamma", cfg.gamma);
  if (o.has("granularity")) {
    const std::string name = o.string("granularity", "");
    try {
      cfg.granularity = granularity_from_string(name);
    } catch (const Error&) {
      config_error("config key " + path + ".granularity: unknown granularity \"" +
                   name + "\"");
    }
  }
  o.finish();
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) {
    config_error("config key " + path + ".gamma: must lie in [0, 1]");
  }
  return cfg;
}

AdaptConfig parse_adapt(const json& j, const std::string& path,
                        bool default_supervised) {
  Obj o(j, path);
  AdaptConfig cfg;
  cfg.lr = o.number("lr", cfg.lr);
  cfg.sweeps = o.integer("sweeps", cfg.sweeps);
  cfg.batch_size = o.integer("batch_size", cfg.batch_size);
  cfg.layers_enabled = o.boolean_array("layers", {});
  cfg.supervised = o.boolean("supervised", default_supervised);
  o.finish();
  if (!(cfg.lr > 0.0)) {
    config_error("config key " + path + ".lr: must be positive");
  }
  if (cfg.sweeps < 1) {
    config_error("config key " + path + ".sweeps: must be at least 1");
  }
  if (cfg.batch_size < 1) {
    config_error("config key " + path + ".batch_size: must be at least 1");
  }
  return cfg;
}

SweepConfig parse_sweeps(const json& j, const std::string& path) {
  Obj o(j, path);
  SweepConfig cfg;
  cfg.data_fractions = o.number_array("data_fractions", {});
  cfg.corruption_rates = o.number_array("corruption_rates", {});
  cfg.layer_sweep = o.boolean("layer_sweep", false);
  o.finish();
  for (double f : cfg.data_fractions) {
    if (!(f > 0.0) || f > 1.0) {
      config_error("config key " + path +
                   ".data_fractions: fractions must lie in (0, 1]");
    }
  }
  for (double r : cfg.corruption_rates) {
    if (r < 0.0 || r >= 1.0) {
      config_error("config key " + path +
                   ".corruption_rates: rates must lie in [0, 1)");
    }
  }
  return cfg;
}

OneShotConfig parse_one_shot(const json& j, const std::string& path) {
  Obj o(j, path);
  OneShotConfig cfg;
  cfg.session_a = o.u64("session_a", cfg.session_a);
  cfg.session_b = o.u64("session_b", cfg.session_b);
  o.finish();
  if (cfg.session_a == cfg.session_b) {
    config_error("config key " + path +
                 ": session_a and session_b must differ");
  }
  return cfg;
}

FactorisedConfig parse_factorised(const json& j, const std::string& path) {
  Obj o(j, path);
  FactorisedConfig cfg;
  cfg.alphas = o.number_array("alphas", cfg.alphas);
  cfg.clean_env = o.integer("clean_env", cfg.clean_env);
  o.finish();
  if (cfg.alphas.empty()) {
    config_error("config key " + path + ".alphas: must not be empty");
  }
  for (double a : cfg.alphas) {
    if (a < 0.0 || a > 1.0) {
      config_error("config key " + path + ".alphas: must lie in [0, 1]");
    }
  }
  if (cfg.clean_env < 0) {
    config_error("config key " + path + ".clean_env: must be non-negative");
  }
  return cfg;
}

GradcheckConfig parse_gradcheck(const json& j, const std::string& path) {
  Obj o(j, path);
  GradcheckConfig cfg;
  cfg.cases = o.integer("cases", cfg.cases);
  o.finish();
  if (cfg.cases < 1) {
    config_error("config key " + path + ".cases: must be at least 1");
  }
  return cfg;
}

BumpDemoConfig parse_bump_demo(const json& j, const std::string& path) {
  Obj o(j, path);
  BumpDemoConfig cfg;
  cfg.hidden_units = o.integer("hidden_units", cfg.hidden_units);
  cfg.reparam = parse_reparam(o, "reparam", cfg.reparam);
  cfg.train_lr = o.number("train_lr", cfg.train_lr);
  cfg.train_iters = o.integer("train_iters", cfg.train_iters);
  cfg.adapt_lr = o.number("adapt_lr", cfg.adapt_lr);
  cfg.adapt_sweeps = o.integer("adapt_sweeps", cfg.adapt_sweeps);
  const json* f1 = o.object("f1");
  const json* f2 = o.object("f2");
  o.finish();
  if (f1 == nullptr) config_error("missing config key: " + path + ".f1");
  if (f2 == nullptr) config_error("missing config key: " + path + ".f2");
  cfg.f1 = parse_bump_spec(*f1, path + ".f1");
  cfg.f2 = parse_bump_spec(*f2, path + ".f2");
  if (cfg.hidden_units < 1) {
    config_error("config key " + path + ".hidden_units: must be positive");
  }
  if (!(cfg.train_lr > 0.0) || !(cfg.adapt_lr > 0.0)) {
    config_error("config key " + path + ": rates must be positive");
  }
  if (cfg.train_iters < 1 || cfg.adapt_sweeps < 1) {
    config_error("config key " + path + ": iteration counts must be positive");
  }
  return cfg;
}

bool is_adapt_family(ExperimentKind kind) {
  return kind == ExperimentKind::adapt || kind == ExperimentKind::two_pass ||
         kind == ExperimentKind::one_shot ||
         kind == ExperimentKind::factorised;
}

bool trains_model(ExperimentKind kind) {
  return kind == ExperimentKind::train_si || kind == ExperimentKind::train_sat;
}

ExperimentConfig parse_root(const json& j, const std::string& source) {
  Obj o(j, "");
  ExperimentConfig cfg;

  const std::string kind_name = o.required_string("kind");
  try {
    cfg.kind = experiment_kind_from_string(kind_name);
  } catch (const Error&) {
    config_error("config key kind: unknown experiment kind \"" + kind_name +
                 "\" in " + source);
  }
  cfg.seed = o.u64("seed", 0);
  cfg.output_dir = o.required_string("output_dir");
  if (cfg.output_dir.empty()) {
    config_error("config key output_dir: must not be empty");
  }

  const bool wants_task = cfg.kind != ExperimentKind::bump_demo &&
                          cfg.kind != ExperimentKind::gradcheck;
  const bool wants_model = trains_model(cfg.kind) || is_adapt_family(cfg.kind);

  if (wants_model) {
    if (const json* m = o.object("model")) {
      cfg.model = parse_model(*m, "model");
    }
    cfg.checkpoint = o.string("checkpoint", "");
    if (trains_model(cfg.kind)) {
      if (!cfg.model.present) {
        config_error("missing config key: model (required for " + kind_name +
                     ")");
      }
      if (!cfg.checkpoint.empty()) {
        config_error("config key checkpoint: not allowed for " + kind_name);
      }
    } else {
      if (cfg.model.present != cfg.checkpoint.empty()) {
        // Either both set or both missing.
        config_error(kind_name +
                     " needs exactly one of a model section or a checkpoint "
                     "path");
      }
    }
    if (cfg.model.present) {
      if (const json* t = o.object("train")) {
        cfg.train = parse_train(*t, "train", cfg.seed);
      } else {
        cfg.train.seed = cfg.seed;
      }
    } else if (o.has("train")) {
      config_error("config key train: requires a model section");
    }
  }

  if (cfg.kind == ExperimentKind::train_sat) {
    if (const json* s = o.object("sat")) {
      cfg.sat = parse_sat(*s, "sat", cfg.seed);
    } else {
      cfg.sat.seed = cfg.seed;
    }
  }

  if (is_adapt_family(cfg.kind)) {
    const bool supervised_default = cfg.kind == ExperimentKind::adapt;
    if (const json* a = o.object("adapt")) {
      cfg.adapt = parse_adapt(*a, "adapt", supervised_default);
    } else {
      cfg.adapt.supervised = supervised_default;
    }
    cfg.adapt.kind = cfg.model.present ? cfg.model.reparam : ReparamKind::exp;
  }

  if (cfg.kind == ExperimentKind::two_pass) {
    if (const json* s = o.object("sweeps")) {
      cfg.sweeps = parse_sweeps(*s, "sweeps");
    }
  }
  if (cfg.kind == ExperimentKind::one_shot) {
    if (const json* s = o.object("one_shot")) {
      cfg.one_shot = parse_one_shot(*s, "one_shot");
    }
  }
  if (cfg.kind == ExperimentKind::factorised) {
    if (const json* f = o.object("factorised")) {
      cfg.factorised = parse_factorised(*f, "factorised");
    }
  }
  if (cfg.kind == ExperimentKind::gradcheck) {
    if (const json* g = o.object("gradcheck")) {
      cfg.gradcheck = parse_gradcheck(*g, "gradcheck");
    }
  }
  if (cfg.kind == ExperimentKind::bump_demo) {
    if (const json* b = o.object("bump")) {
      cfg.bump = parse_bump_demo(*b, "bump");
    } else {
      config_error("missing config key: bump (required for bump_demo)");
    }
  }

  if (wants_task) {
    if (const json* t = o.object("task")) {
      cfg.task = parse_task(*t, "task");
    } else {
      config_error("missing config key: task (required for " + kind_name + ")");
    }
    if (is_adapt_family(cfg.kind) &&
        (cfg.task.type == TaskConfig::Type::bump ||
         cfg.task.type == TaskConfig::Type::mixture)) {
      config_error("config key task.type: " + kind_name +
                   " requires a classification task (multicluster or file)");
    }
    if (cfg.kind == ExperimentKind::one_shot &&
        cfg.task.type != TaskConfig::Type::multicluster) {
      config_error("config key task.type: one_shot requires a multicluster "
                   "task (sessions are generator salts)");
    }
  }

  o.finish();
  return cfg;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::train_si: return "train_si";
    case ExperimentKind::train_sat: return "train_sat";
    case ExperimentKind::adapt: return "adapt";
    case ExperimentKind::two_pass: return "two_pass";
    case ExperimentKind::one_shot: return "one_shot";
    case ExperimentKind::factorised: return "factorised";
    case ExperimentKind::bump_demo: return "bump_demo";
    case ExperimentKind::gradcheck: return "gradcheck";
  }
  throw Error(ErrorCode::internal, "unhandled experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::train_si, ExperimentKind::train_sat,
        ExperimentKind::adapt, ExperimentKind::two_pass,
        ExperimentKind::one_shot, ExperimentKind::factorised,
        ExperimentKind::bump_demo, ExperimentKind::gradcheck}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::config, "unknown experiment kind \"" + name + "\"");
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config,
                source + ": invalid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::config, source + ": config must be a JSON object");
  }
  return parse_root(j, source);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open for reading: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

TaskConfig parse_task_config(const std::string& json_text,
                             const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config,
                source + ": invalid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::config, source + ": task spec must be a JSON object");
  }
  return parse_task(j, "task");
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;

  const bool wants_model = cfg.kind == ExperimentKind::train_si ||
                           cfg.kind == ExperimentKind::train_sat ||
                           is_adapt_family(cfg.kind);
  if (wants_model) {
    if (cfg.model.present) {
      json m;
      m["dims"] = cfg.model.dims;
      m["output"] = to_string(cfg.model.output_kind);
      m["reparam"] = to_string(cfg.model.reparam);
      j["model"] = m;
      json t;
      t["lr"] = cfg.train.initial_lr;
      t["batch_size"] = cfg.train.batch_size;
      t["max_epochs"] = cfg.train.max_epochs;
      t["ramp_threshold"] = cfg.train.newbob.ramp_threshold;
      t["stop_threshold"] = cfg.train.newbob.stop_threshold;
      t["holdout_fraction"] = cfg.train.newbob.holdout_fraction;
      j["train"] = t;
    } else {
      j["checkpoint"] = cfg.checkpoint;
    }
  }

  if (cfg.kind == ExperimentKind::train_sat) {
    json s;
    s["gamma"] = cfg.sat.gamma;
    s["granularity"] = to_string(cfg.sat.granularity);
    j["sat"] = s;
  }

  if (is_adapt_family(cfg.kind)) {
    json a;
    a["lr"] = cfg.adapt.lr;
    a["sweeps"] = cfg.adapt.sweeps;
    a["batch_size"] = cfg.adapt.batch_size;
    if (!cfg.adapt.layers_enabled.empty()) {
      a["layers"] = cfg.adapt.layers_enabled;
    }
    a["supervised"] = cfg.adapt.supervised;
    j["adapt"] = a;
  }

  if (cfg.kind == ExperimentKind::two_pass) {
    json s;
    if (!cfg.sweeps.data_fractions.empty()) {
      s["data_fractions"] = cfg.sweeps.data_fractions;
    }
    if (!cfg.sweeps.corruption_rates.empty()) {
      s["corruption_rates"] = cfg.sweeps.corruption_rates;
    }
    s["layer_sweep"] = cfg.sweeps.layer_sweep;
    j["sweeps"] = s;
  }
  if (cfg.kind == ExperimentKind::one_shot) {
    j["one_shot"] = {{"session_a", cfg.one_shot.session_a},
                     {"session_b", cfg.one_shot.session_b}};
  }
  if (cfg.kind == ExperimentKind::factorised) {
    j["factorised"] = {{"alphas", cfg.factorised.alphas},
                       {"clean_env", cfg.factorised.clean_env}};
  }
  if (cfg.kind == ExperimentKind::gradcheck) {
    j["gradcheck"] = {{"cases", cfg.gradcheck.cases}};
  }
  if (cfg.kind == ExperimentKind::bump_demo) {
    json b;
    b["hidden_units"] = cfg.bump.hidden_units;
    b["reparam"] = to_string(cfg.bump.reparam);
    b["train_lr"] = cfg.bump.train_lr;
    b["train_iters"] = cfg.bump.train_iters;
    b["adapt_lr"] = cfg.bump.adapt_lr;
    b["adapt_sweeps"] = cfg.bump.adapt_sweeps;
    b["f1"] = bump_spec_json(cfg.bump.f1);
    b["f2"] = bump_spec_json(cfg.bump.f2);
    j["bump"] = b;
  }

  if (cfg.kind != ExperimentKind::bump_demo &&
      cfg.kind != ExperimentKind::gradcheck) {
    j["task"] = task_json(cfg.task);
  }

  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return binio::fnv1a64(resolved_config_json(cfg));
}

}  // namespace lhuc
