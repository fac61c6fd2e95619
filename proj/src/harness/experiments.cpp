// src/harness/experiments.cpp
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

#include "harness/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core/adapter.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "core/trainer.hpp"
#include "harness/checkpoint.hpp"
#include "harness/dataset_io.hpp"
#include "harness/gradcheck.hpp"

namespace lhuc {
namespace {

namespace fs = std::filesystem;

bool verbose() {
  const char* v = std::getenv("LHUCLAB_VERBOSE");
  return v != nullptr && v[0] != '\0' && !(v[0] == '0' && v[1] == '\0');
}

void note(const std::string& msg) {
  if (verbose()) std::fprintf(stderr, "[lhuclab] %s\n", msg.c_str());
}

// Shortest representation that round-trips a double exactly.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (f.fail()) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
}

// Removes every file registered with add() unless disarm() ran first, so a
// failed run never leaves a partially written output directory behind.
// Register each path *before* writing it.
class ArtifactGuard {
 public:
  ArtifactGuard() = default;
  ArtifactGuard(const ArtifactGuard&) = delete;
  ArtifactGuard& operator=(const ArtifactGuard&) = delete;
  ~ArtifactGuard() {
    if (!armed_) return;
    for (const auto& p : files_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  void add(const fs::path& p) { files_.push_back(p); }
  void disarm() { armed_ = false; }

 private:
  std::vector<fs::path> files_;
  bool armed_ = true;
};

// Appends metric records; aggregate records (no step, no cluster) also land
// in the run summary under the metric name.
struct Sink {
  std::string exp_name;
  RunResult* out = nullptr;

  void rec(const std::string& metric, double value,
           std::optional<int> step = std::nullopt,
           std::optional<int> cluster = std::nullopt) {
    out->records.push_back(MetricRecord{exp_name, metric, value, step, cluster});
    if (!step.has_value() && !cluster.has_value()) out->summary[metric] = value;
  }
};

NetworkParams fresh_network(const ExperimentConfig& c) {
  return init_network(c.model.dims, c.model.output_kind,
                      derive_seed(c.seed, stream::kWeightInit));
}

void check_model_fits(const NetworkParams& net, const FrameDataset& data,
                      const std::string& what) {
  if (net.input_dim() != data.dim()) {
    throw Error(ErrorCode::config,
                what + ": model input dim " + std::to_string(net.input_dim()) +
                    " does not match task feature dim " +
                    std::to_string(data.dim()));
  }
  if (data.task == TaskKind::classification) {
    if (net.output_kind != OutputKind::softmax_classifier) {
      throw Error(ErrorCode::config,
                  what + ": classification task needs a classifier model");
    }
    if (net.output_dim() < data.n_classes) {
      throw Error(ErrorCode::config,
                  what + ": model has " + std::to_string(net.output_dim()) +
                      " outputs but the task has " +
                      std::to_string(data.n_classes) + " classes");
    }
  } else if (net.output_kind != OutputKind::linear_regressor) {
    throw Error(ErrorCode::config,
                what + ": regression task needs a regressor model");
  }
}

std::string curve_csv(const std::vector<EpochRecord>& curve) {
  std::string s = "epoch,lr,train_loss,cv_loss\n";
  for (const auto& e : curve) {
    s += std::to_string(e.epoch);
    s += ',';
    s += fmt(e.lr);
    s += ',';
    s += fmt(e.train_loss);
    s += ',';
    s += fmt(e.cv_loss);
    s += '\n';
  }
  return s;
}

void record_curve(Sink& sink, const std::vector<EpochRecord>& curve) {
  for (const auto& e : curve) {
    sink.rec("train_loss", e.train_loss, e.epoch);
    sink.rec("cv_loss", e.cv_loss, e.epoch);
  }
}

void run_train_si(const ExperimentConfig& c, const TaskData& data,
                  const fs::path& dir, Sink& sink, ArtifactGuard& guard) {
  note("training speaker-independent model");
  TrainResult res = train_si(data.train, fresh_network(c), c.train);
  record_curve(sink, res.curve);
  sink.rec("best_epoch", res.best_epoch);
  sink.rec("best_cv", res.best_cv);
  if (data.test.frames() > 0) {
    const Metrics m = evaluate(res.params, data.test);
    sink.rec("fer_si", m.frame_error_rate);
    sink.rec("loss_si", m.mean_loss);
  }
  guard.add(dir / "train_curve.csv");
  write_text(dir / "train_curve.csv", curve_csv(res.curve));
  Checkpoint ckpt;
  ckpt.params = std::move(res.params);
  ckpt.kind = c.model.reparam;
  ckpt.prov = Provenance{config_hash(c), c.seed, res.best_epoch};
  guard.add(dir / "model.ckpt");
  save_checkpoint((dir / "model.ckpt").string(), ckpt);
}

void run_train_sat(const ExperimentConfig& c, const TaskData& data,
                   const fs::path& dir, Sink& sink, ArtifactGuard& guard) {
  note("training speaker-adaptive model");
  SatTrainResult res =
      train_sat(data.train, fresh_network(c), c.train, c.sat, c.model.reparam);
  record_curve(sink, res.curve);
  sink.rec("best_epoch", res.best_epoch);
  sink.rec("best_cv", res.best_cv);
  if (data.test.frames() > 0) {
    // Held-out speakers are unseen, so score in speaker-independent mode.
    const Metrics m = evaluate(res.params, res.bank.transforms.at(0), data.test);
    sink.rec("fer_si", m.frame_error_rate);
    sink.rec("loss_si", m.mean_loss);
  }
  guard.add(dir / "train_curve.csv");
  write_text(dir / "train_curve.csv", curve_csv(res.curve));
  Checkpoint ckpt;
  ckpt.params = std::move(res.params);
  ckpt.kind = c.model.reparam;
  ckpt.bank = std::move(res.bank);
  ckpt.prov = Provenance{config_hash(c), c.seed, res.best_epoch};
  guard.add(dir / "model.ckpt");
  save_checkpoint((dir / "model.ckpt").string(), ckpt);
}

struct ModelSource {
  NetworkParams net;
  std::optional<TransformBank> bank;
  ReparamKind kind = ReparamKind::exp;
};

// Adaptation experiments take their model either from a checkpoint or by
// training a fresh speaker-independent model on the task's training split.
ModelSource obtain_model(const ExperimentConfig& c, const TaskData& data,
                         Sink& sink) {
  ModelSource src;
  if (!c.checkpoint.empty()) {
    note("loading checkpoint " + c.checkpoint);
    Checkpoint ckpt = load_checkpoint(c.checkpoint);
    src.net = std::move(ckpt.params);
    src.bank = std::move(ckpt.bank);
    src.kind = ckpt.kind;
    return src;
  }
  note("training speaker-independent model for adaptation");
  TrainResult res = train_si(data.train, fresh_network(c), c.train);
  sink.rec("train_best_cv", res.best_cv);
  src.net = std::move(res.params);
  src.kind = c.model.reparam;
  return src;
}

std::vector<int> first_pass_targets(const NetworkParams& net,
                                    const TransformBank* bank,
                                    const FrameDataset& data,
                                    const AdaptConfig& cfg) {
  if (cfg.supervised) return data.labels;
  return bank ? pseudo_label(net, *bank, data) : pseudo_label(net, data);
}

void run_adapt_family(const ExperimentConfig& c, const TaskData& data,
                      const fs::path& dir, Sink& sink, ArtifactGuard& guard) {
  const FrameDataset& eval_set = data.test.frames() > 0 ? data.test : data.train;
  ModelSource src = obtain_model(c, data, sink);
  check_model_fits(src.net, eval_set, to_string(c.kind));
  AdaptConfig acfg = c.adapt;
  acfg.kind = src.kind;
  const TransformBank* bank = src.bank ? &*src.bank : nullptr;

  const std::vector<int> spk = eval_set.speakers();
  if (spk.empty()) {
    throw Error(ErrorCode::config, "adaptation task has no speakers");
  }
  const double n = static_cast<double>(spk.size());

  std::string csv = "speaker,frames,fer_unadapted,fer_adapted,delta\n";
  double sum_un = 0.0;
  double sum_ad = 0.0;
  int improved = 0;
  for (int s : spk) {
    const FrameDataset sub = eval_set.subset(eval_set.frames_of_speaker(s));
    const TwoPassResult r = two_pass_adapt(src.net, bank, sub, acfg);
    sink.rec("fer_unadapted", r.unadapted.frame_error_rate, std::nullopt, s);
    sink.rec("fer_adapted", r.adapted.frame_error_rate, std::nullopt, s);
    csv += std::to_string(s) + ',' + std::to_string(sub.frames()) + ',' +
           fmt(r.unadapted.frame_error_rate) + ',' +
           fmt(r.adapted.frame_error_rate) + ',' +
           fmt(r.adapted.frame_error_rate - r.unadapted.frame_error_rate) + '\n';
    sum_un += r.unadapted.frame_error_rate;
    sum_ad += r.adapted.frame_error_rate;
    if (r.adapted.frame_error_rate < r.unadapted.frame_error_rate) ++improved;
    note("speaker " + std::to_string(s) + ": fer " +
         fmt(r.unadapted.frame_error_rate) + " -> " +
         fmt(r.adapted.frame_error_rate));
  }
  sink.rec("fer_unadapted", sum_un / n);
  sink.rec("fer_adapted", sum_ad / n);
  sink.rec("speakers_improved", improved);
  sink.rec("n_speakers", n);
  guard.add(dir / "per_speaker.csv");
  write_text(dir / "per_speaker.csv", csv);

  if (c.kind != ExperimentKind::two_pass) return;

  if (!c.sweeps.data_fractions.empty()) {
    note("adaptation-data-amount sweep");
    std::string fcsv = "fraction,fer_adapted_mean\n";
    for (std::size_t i = 0; i < c.sweeps.data_fractions.size(); ++i) {
      const double f = c.sweeps.data_fractions[i];
      double sum = 0.0;
      for (int s : spk) {
        const FrameDataset full = eval_set.subset(eval_set.frames_of_speaker(s));
        const int k = std::max(1, static_cast<int>(f * full.frames()));
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        const FrameDataset prefix = full.subset(idx);
        const std::vector<int> targets =
            first_pass_targets(src.net, bank, prefix, acfg);
        const LhucTransform t = adapt(src.net, prefix, &targets, acfg);
        sum += evaluate(src.net, t, full).frame_error_rate;
      }
      const int step = static_cast<int>(i);
      sink.rec("fraction", f, step);
      sink.rec("fraction_fer_adapted", sum / n, step);
      fcsv += fmt(f) + ',' + fmt(sum / n) + '\n';
    }
    guard.add(dir / "fraction_sweep.csv");
    write_text(dir / "fraction_sweep.csv", fcsv);
  }

  if (!c.sweeps.corruption_rates.empty()) {
    note("adaptation-target-quality sweep");
    std::string ccsv = "rate,fer_adapted_mean\n";
    for (std::size_t i = 0; i < c.sweeps.corruption_rates.size(); ++i) {
      const double rate = c.sweeps.corruption_rates[i];
      double sum = 0.0;
      for (int s : spk) {
        const FrameDataset sub = eval_set.subset(eval_set.frames_of_speaker(s));
        const std::vector<int> corrupted = corrupt_labels(
            sub.labels, eval_set.n_classes, rate,
            derive_seed(c.seed, stream::kCorrupt,
                        i * 100000 + static_cast<std::uint64_t>(s)));
        const LhucTransform t = adapt(src.net, sub, &corrupted, acfg);
        sum += evaluate(src.net, t, sub).frame_error_rate;
      }
      const int step = static_cast<int>(i);
      sink.rec("corruption_rate", rate, step);
      sink.rec("corruption_fer_adapted", sum / n, step);
      ccsv += fmt(rate) + ',' + fmt(sum / n) + '\n';
    }
    guard.add(dir / "corruption_sweep.csv");
    write_text(dir / "corruption_sweep.csv", ccsv);
  }

  if (c.sweeps.layer_sweep) {
    note("adapted-layers sweep");
    const int n_hidden = src.net.n_hidden();
    std::string lcsv = "layers,fer_adapted_mean\n";
    for (int k = 1; k <= n_hidden; ++k) {
      AdaptConfig a2 = acfg;
      a2.layers_enabled.assign(static_cast<std::size_t>(n_hidden), false);
      for (int l = 0; l < k; ++l) a2.layers_enabled[static_cast<std::size_t>(l)] = true;
      double sum = 0.0;
      for (int s : spk) {
        const FrameDataset sub = eval_set.subset(eval_set.frames_of_speaker(s));
        sum += two_pass_adapt(src.net, bank, sub, a2).adapted.frame_error_rate;
      }
      sink.rec("layer_fer_adapted", sum / n, k);
      lcsv += std::to_string(k) + ',' + fmt(sum / n) + '\n';
    }
    guard.add(dir / "layer_sweep.csv");
    write_text(dir / "layer_sweep.csv", lcsv);
  }
}

void run_one_shot(const ExperimentConfig& c, const TaskData& data,
                  const fs::path& dir, Sink& sink, ArtifactGuard& guard) {
  ModelSource src = obtain_model(c, data, sink);
  AdaptConfig acfg = c.adapt;
  acfg.kind = src.kind;
  const TransformBank* bank = src.bank ? &*src.bank : nullptr;

  note("generating session datasets");
  const MulticlusterData a = gen_multicluster(c.task.cluster, c.one_shot.session_a);
  const MulticlusterData b = gen_multicluster(c.task.cluster, c.one_shot.session_b);
  check_model_fits(src.net, a.test, "one_shot");

  const std::vector<int> spk = a.test.speakers();
  if (spk.empty()) {
    throw Error(ErrorCode::config, "one-shot experiment needs held-out speakers");
  }
  const double n = static_cast<double>(spk.size());

  std::string csv = "speaker,frames_b,fer_unadapted_b,fer_two_pass_b,fer_one_shot_b\n";
  double sum_un = 0.0;
  double sum_tp = 0.0;
  double sum_os = 0.0;
  double sum_abs = 0.0;
  for (int s : spk) {
    const FrameDataset sub_a = a.test.subset(a.test.frames_of_speaker(s));
    const FrameDataset sub_b = b.test.subset(b.test.frames_of_speaker(s));
    const TwoPassResult ra = two_pass_adapt(src.net, bank, sub_a, acfg);
    const TwoPassResult rb = two_pass_adapt(src.net, bank, sub_b, acfg);
    const Metrics os = one_shot_apply(src.net, ra.transform, sub_b);
    sink.rec("fer_two_pass_b", rb.adapted.frame_error_rate, std::nullopt, s);
    sink.rec("fer_one_shot_b", os.frame_error_rate, std::nullopt, s);
    csv += std::to_string(s) + ',' + std::to_string(sub_b.frames()) + ',' +
           fmt(rb.unadapted.frame_error_rate) + ',' +
           fmt(rb.adapted.frame_error_rate) + ',' + fmt(os.frame_error_rate) +
           '\n';
    sum_un += rb.unadapted.frame_error_rate;
    sum_tp += rb.adapted.frame_error_rate;
    sum_os += os.frame_error_rate;
    sum_abs += std::abs(rb.adapted.frame_error_rate - os.frame_error_rate);
    note("speaker " + std::to_string(s) + ": two-pass " +
         fmt(rb.adapted.frame_error_rate) + " vs one-shot " +
         fmt(os.frame_error_rate));
  }
  sink.rec("fer_unadapted_b", sum_un / n);
  sink.rec("fer_two_pass_b", sum_tp / n);
  sink.rec("fer_one_shot_b", sum_os / n);
  sink.rec("one_shot_gap", std::abs(sum_tp - sum_os) / n);
  sink.rec("one_shot_mean_abs_diff", sum_abs / n);
  sink.rec("n_speakers", n);
  guard.add(dir / "one_shot.csv");
  write_text(dir / "one_shot.csv", csv);
}

void run_factorised(const ExperimentConfig& c, const TaskData& data,
                    const fs::path& dir, Sink& sink, ArtifactGuard& guard) {
  const FrameDataset& eval_set = data.test.frames() > 0 ? data.test : data.train;
  if (!eval_set.has_env()) {
    throw Error(ErrorCode::config,
                "factorised experiment needs a task with environment ids");
  }
  const std::vector<int> envs = eval_set.environments();
  if (std::find(envs.begin(), envs.end(), c.factorised.clean_env) == envs.end()) {
    throw Error(ErrorCode::config,
                "factorised clean_env " + std::to_string(c.factorised.clean_env) +
                    " is not present in the evaluation data");
  }
  ModelSource src = obtain_model(c, data, sink);
  check_model_fits(src.net, eval_set, "factorised");
  AdaptConfig acfg = c.adapt;
  acfg.kind = src.kind;

  std::string csv =
      "alpha,speaker,env,frames,fer_unadapted,fer_speaker,fer_env,"
      "fer_interpolated,fer_joint\n";
  for (std::size_t i = 0; i < c.factorised.alphas.size(); ++i) {
    const double alpha = c.factorised.alphas[i];
    note("factorised pass at alpha " + fmt(alpha));
    const FactorisedReport rep = factorised_experiment(
        src.net, eval_set, c.factorised.clean_env, alpha, acfg);
    const int step = static_cast<int>(i);
    sink.rec("alpha", alpha, step);
    sink.rec("fer_unadapted", rep.unadapted.frame_error_rate, step);
    sink.rec("fer_speaker", rep.speaker_only.frame_error_rate, step);
    sink.rec("fer_env", rep.env_only.frame_error_rate, step);
    sink.rec("fer_interpolated", rep.interpolated.frame_error_rate, step);
    sink.rec("fer_joint", rep.joint.frame_error_rate, step);
    for (const auto& cond : rep.conditions) {
      csv += fmt(alpha) + ',' + std::to_string(cond.speaker) + ',' +
             std::to_string(cond.env) + ',' + std::to_string(cond.frames) +
             ',' + fmt(cond.fer_unadapted) + ',' + fmt(cond.fer_speaker) + ',' +
             fmt(cond.fer_env) + ',' + fmt(cond.fer_interpolated) + ',' +
             fmt(cond.fer_joint) + '\n';
    }
    // Only the interpolated condition depends on alpha; key it by index.
    sink.out->summary["alpha_" + std::to_string(i)] = alpha;
    sink.out->summary["fer_interpolated_" + std::to_string(i)] =
        rep.interpolated.frame_error_rate;
    if (i == 0) {
      sink.out->summary["fer_unadapted"] = rep.unadapted.frame_error_rate;
      sink.out->summary["fer_speaker"] = rep.speaker_only.frame_error_rate;
      sink.out->summary["fer_env"] = rep.env_only.frame_error_rate;
      sink.out->summary["fer_joint"] = rep.joint.frame_error_rate;
    }
  }
  guard.add(dir / "factorised.csv");
  write_text(dir / "factorised.csv", csv);
}

void run_bump_demo(const ExperimentConfig& c, const fs::path& dir, Sink& sink,
                   ArtifactGuard& guard) {
  const BumpDemoConfig& bd = c.bump;
  const FrameDataset f1 = gen_bump(bd.f1);
  const FrameDataset f2 = gen_bump(bd.f2);
  NetworkParams net =
      init_network({1, bd.hidden_units, 1}, OutputKind::linear_regressor,
                   derive_seed(c.seed, stream::kWeightInit));
  note("full-batch training on the first target function");
  for (int it = 0; it < bd.train_iters; ++it) {
    sgd_step(net, nullptr, f1, {}, bd.train_lr);
  }
  const double mse_train = evaluate(net, f1).mean_loss;
  const double mse_un = evaluate(net, f2).mean_loss;
  AdaptConfig acfg;
  acfg.lr = bd.adapt_lr;
  acfg.sweeps = bd.adapt_sweeps;
  acfg.batch_size = f2.frames();  // full-batch amplitude updates
  acfg.kind = bd.reparam;
  acfg.supervised = true;
  note("adapting amplitudes to the second target function");
  const LhucTransform t = adapt(net, f2, nullptr, acfg);
  const double mse_ad = evaluate(net, t, f2).mean_loss;
  sink.rec("mse_train_f1", mse_train);
  sink.rec("mse_unadapted_f2", mse_un);
  sink.rec("mse_adapted_f2", mse_ad);
  sink.rec("mse_ratio", mse_un > 0.0 ? mse_ad / mse_un : 0.0);

  const ForwardTrace si = forward(net, f2.features);
  const ForwardTrace ad = forward(net, t, f2.features);
  std::vector<int> order(static_cast<std::size_t>(f2.frames()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int l, int r) {
    return f2.features(l, 0) < f2.features(r, 0);
  });
  std::string csv = "x,target,si_prediction,adapted_prediction\n";
  for (int i : order) {
    csv += fmt(f2.features(i, 0)) + ',' + fmt(f2.targets(i, 0)) + ',' +
           fmt(si.output(i, 0)) + ',' + fmt(ad.output(i, 0)) + '\n';
  }
  guard.add(dir / "bump_table.csv");
  write_text(dir / "bump_table.csv", csv);
}

void run_gradcheck_experiment(const ExperimentConfig& c, Sink& sink) {
  note("finite-difference gradient verification");
  const GradcheckReport rep = run_gradcheck(c.seed, c.gradcheck.cases);
  for (const auto& cs : rep.cases) {
    sink.rec("case_max_rel_theta", cs.max_rel_theta, cs.index);
    sink.rec("case_max_rel_amp", cs.max_rel_amp, cs.index);
  }
  sink.rec("max_rel_theta", rep.max_rel_theta);
  sink.rec("max_rel_amp", rep.max_rel_amp);
  sink.rec("tolerance", rep.tolerance);
  sink.rec("cases", static_cast<double>(rep.cases.size()));
  sink.rec("pass", rep.pass ? 1.0 : 0.0);
}

}  // namespace

TaskData materialize_task(const TaskConfig& task) {
  TaskData d;
  switch (task.type) {
    case TaskConfig::Type::multicluster: {
      MulticlusterData md = gen_multicluster(task.cluster, task.session);
      d.train = std::move(md.train);
      d.test = std::move(md.test);
      return d;
    }
    case TaskConfig::Type::bump:
      d.train = gen_bump(task.bump);
      break;
    case TaskConfig::Type::mixture:
      d.train = gen_mixture_bump(task.mixture_a, task.mixture_b, task.mixture_n,
                                 task.mixture_seed);
      break;
    case TaskConfig::Type::file:
      d.train = load_dataset(task.train_path);
      if (!task.test_path.empty()) {
        d.test = load_dataset(task.test_path);
        return d;
      }
      break;
  }
  // No held-out split: an empty dataset mirroring the training schema.
  d.test.task = d.train.task;
  d.test.features = Matrix(0, d.train.dim());
  d.test.n_classes = d.train.n_classes;
  return d;
}

std::vector<std::string> synth_generate(const TaskConfig& task,
                                        const std::string& out_base) {
  if (task.type == TaskConfig::Type::file) {
    throw Error(ErrorCode::invalid_argument,
                "task type \"file\" names datasets to load, not a generator");
  }
  const TaskData d = materialize_task(task);
  std::vector<std::string> paths;
  if (task.type == TaskConfig::Type::multicluster) {
    paths.push_back(out_base + ".train.lds");
    paths.push_back(out_base + ".test.lds");
    save_dataset(paths[0], d.train);
    save_dataset(paths[1], d.test);
  } else {
    paths.push_back(out_base + ".lds");
    save_dataset(paths[0], d.train);
  }
  return paths;
}

RunResult run_experiment(const ExperimentConfig& raw) {
  // Normalizing through the resolved-config round trip validates configs
  // built in code exactly like file-loaded ones and pins down what a rerun
  // of the written resolved_config.json will see.
  const std::string resolved = resolved_config_json(raw);
  const ExperimentConfig c = parse_experiment_config(resolved, "resolved config");
  if (c.output_dir.empty()) {
    throw Error(ErrorCode::config, "output_dir must not be empty");
  }

  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::io, "cannot create output directory " + dir.string() +
                                   ": " + ec.message());
  }

  RunResult out;
  out.output_dir = dir.string();
  Sink sink{to_string(c.kind), &out};
  ArtifactGuard guard;

  TaskData data;
  if (c.kind != ExperimentKind::bump_demo &&
      c.kind != ExperimentKind::gradcheck) {
    note("materializing task data");
    data = materialize_task(c.task);
  }

  switch (c.kind) {
    case ExperimentKind::train_si:
      run_train_si(c, data, dir, sink, guard);
      break;
    case ExperimentKind::train_sat:
      run_train_sat(c, data, dir, sink, guard);
      break;
    case ExperimentKind::adapt:
    case ExperimentKind::two_pass:
      run_adapt_family(c, data, dir, sink, guard);
      break;
    case ExperimentKind::one_shot:
      run_one_shot(c, data, dir, sink, guard);
      break;
    case ExperimentKind::factorised:
      run_factorised(c, data, dir, sink, guard);
      break;
    case ExperimentKind::bump_demo:
      run_bump_demo(c, dir, sink, guard);
      break;
    case ExperimentKind::gradcheck:
      run_gradcheck_experiment(c, sink);
      break;
  }

  guard.add(dir / "resolved_config.json");
  write_text(dir / "resolved_config.json", resolved);
  guard.add(dir / "metrics.jsonl");
  write_metrics((dir / "metrics.jsonl").string(), out.records);
  guard.disarm();
  note("run complete: " + dir.string());
  return out;
}

}  // namespace lhuc
