// src/capi/lhuclab_capi.cpp
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

#include "lhuclab.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"

#include "core/adapter.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "harness/checkpoint.hpp"
#include "harness/config.hpp"
#include "harness/dataset_io.hpp"
#include "harness/experiments.hpp"
#include "harness/gradcheck.hpp"

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

lhuc_status status_of(lhuc::ErrorCode code) {
  switch (code) {
    case lhuc::ErrorCode::invalid_argument:
      return LHUC_ERR_INVALID_ARGUMENT;
    case lhuc::ErrorCode::shape:
      return LHUC_ERR_SHAPE;
    case lhuc::ErrorCode::config:
      return LHUC_ERR_CONFIG;
    case lhuc::ErrorCode::io:
      return LHUC_ERR_IO;
    case lhuc::ErrorCode::format:
      return LHUC_ERR_FORMAT;
    case lhuc::ErrorCode::numeric:
      return LHUC_ERR_NUMERIC;
    case lhuc::ErrorCode::unsupported:
      return LHUC_ERR_UNSUPPORTED;
    case lhuc::ErrorCode::internal:
      return LHUC_ERR_INTERNAL;
  }
  return LHUC_ERR_INTERNAL;
}

// Runs the body, translating exceptions into status codes + g_last_error.
template <typename F>
lhuc_status guarded(F&& body) {
  try {
    return body();
  } catch (const lhuc::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LHUC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LHUC_ERR_INTERNAL;
  }
}

lhuc_status require_arg(const void* p, const char* name) {
  if (p != nullptr) return LHUC_OK;
  g_last_error = std::string(name) + " must not be NULL";
  return LHUC_ERR_INVALID_ARGUMENT;
}

// malloc-based copy so lhuc_string_free stays allocator-agnostic for callers.
char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  if (out != nullptr) *out = dup_string(s);
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string run_summary_json(const lhuc::RunResult& r) {
  json j;
  j["output_dir"] = r.output_dir;
  j["summary"] = json(r.summary);
  return j.dump(2) + "\n";
}

lhuc_status run_config(const lhuc::ExperimentConfig& cfg,
                       char** summary_json_out) {
  const lhuc::RunResult r = lhuc::run_experiment(cfg);
  put_string(summary_json_out, run_summary_json(r));
  return LHUC_OK;
}

}  // namespace

extern "C" {

const char* lhuc_version(void) { return "0.1.0"; }

const char* lhuc_last_error(void) { return g_last_error.c_str(); }

void lhuc_string_free(char* s) { std::free(s); }

lhuc_status lhuc_run_experiment_file(const char* config_path,
                                     char** summary_json_out) {
  if (lhuc_status s = require_arg(config_path, "config_path"); s != LHUC_OK)
    return s;
  return guarded([&] {
    return run_config(lhuc::load_experiment_config(config_path),
                      summary_json_out);
  });
}

lhuc_status lhuc_run_experiment_json(const char* config_json,
                                     char** summary_json_out) {
  if (lhuc_status s = require_arg(config_json, "config_json"); s != LHUC_OK)
    return s;
  return guarded([&] {
    return run_config(lhuc::parse_experiment_config(config_json, "config"),
                      summary_json_out);
  });
}

lhuc_status lhuc_gradcheck(uint64_t seed, int cases, int* pass_out,
                           double* max_rel_out, char** report_json_out) {
  return guarded([&] {
    const lhuc::GradcheckReport rep =
        lhuc::run_gradcheck(seed, cases <= 0 ? 25 : cases);
    if (pass_out != nullptr) *pass_out = rep.pass ? 1 : 0;
    if (max_rel_out != nullptr) *max_rel_out = rep.max_rel();
    if (report_json_out != nullptr) {
      json j;
      j["pass"] = rep.pass;
      j["tolerance"] = rep.tolerance;
      j["max_rel_theta"] = rep.max_rel_theta;
      j["max_rel_amp"] = rep.max_rel_amp;
      json cs = json::array();
      for (const auto& c : rep.cases) {
        cs.push_back({{"index", c.index},
                      {"dims", c.dims},
                      {"reparam", c.reparam},
                      {"output", c.output},
                      {"max_rel_theta", c.max_rel_theta},
                      {"max_rel_amp", c.max_rel_amp}});
      }
      j["cases"] = cs;
      put_string(report_json_out, j.dump(2) + "\n");
    }
    return LHUC_OK;
  });
}

lhuc_status lhuc_synth_generate(const char* spec_json, const char* out_base,
                                char** files_json_out) {
  if (lhuc_status s = require_arg(spec_json, "spec_json"); s != LHUC_OK)
    return s;
  if (lhuc_status s = require_arg(out_base, "out_base"); s != LHUC_OK) return s;
  return guarded([&] {
    const lhuc::TaskConfig task = lhuc::parse_task_config(spec_json, "spec");
    const std::vector<std::string> files = lhuc::synth_generate(task, out_base);
    json j;
    j["files"] = files;
    put_string(files_json_out, j.dump(2) + "\n");
    return LHUC_OK;
  });
}

lhuc_status lhuc_checkpoint_inspect(const char* path, char** info_json_out) {
  if (lhuc_status s = require_arg(path, "path"); s != LHUC_OK) return s;
  return guarded([&] {
    const lhuc::Checkpoint ckpt = lhuc::load_checkpoint(path);
    const lhuc::TransformBank* bank = ckpt.bank ? &*ckpt.bank : nullptr;
    const lhuc::ParamCount count = lhuc::count_parameters(ckpt.params, bank);
    json j;
    j["type"] = "checkpoint";
    json layers = json::array();
    for (const auto& l : ckpt.params.layers) {
      layers.push_back({{"units", l.W.rows}, {"inputs", l.W.cols}});
    }
    j["layers"] = layers;
    j["n_hidden"] = ckpt.params.n_hidden();
    j["output"] = ckpt.params.output_kind == lhuc::OutputKind::softmax_classifier
                      ? "classifier"
                      : "regressor";
    j["reparam"] = lhuc::to_string(ckpt.kind);
    j["parameters"] = {{"si", count.si}, {"per_cluster", count.per_cluster}};
    if (bank != nullptr) {
      std::vector<int> ids;
      for (const auto& [id, t] : bank->transforms) ids.push_back(id);
      j["bank"] = {{"clusters", ids}};
    } else {
      j["bank"] = nullptr;
    }
    j["provenance"] = {{"config_hash", hex64(ckpt.prov.config_hash)},
                       {"seed", ckpt.prov.seed},
                       {"epoch", ckpt.prov.epoch}};
    put_string(info_json_out, j.dump(2) + "\n");
    return LHUC_OK;
  });
}

lhuc_status lhuc_dataset_inspect(const char* path, char** info_json_out) {
  if (lhuc_status s = require_arg(path, "path"); s != LHUC_OK) return s;
  return guarded([&] {
    const lhuc::FrameDataset d = lhuc::load_dataset(path);
    json j;
    j["type"] = "dataset";
    const bool classify = d.task == lhuc::TaskKind::classification;
    j["task"] = classify ? "classification" : "regression";
    j["frames"] = d.frames();
    j["dim"] = d.dim();
    if (classify) {
      j["n_classes"] = d.n_classes;
    } else {
      j["target_dim"] = d.targets.cols;
    }
    j["speakers"] = d.speakers();
    j["environments"] = d.environments();
    put_string(info_json_out, j.dump(2) + "\n");
    return LHUC_OK;
  });
}

}  // extern "C"
