// src/core/synth.cpp
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

#include "core/synth.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lhuc {

namespace {

void check_bump_spec(const BumpSpec& spec) {
  auto bad = [](const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, "bump spec: " + msg);
  };
  if (spec.n_points < 0) bad("negative point count");
  if (!(spec.x_lo < spec.x_hi)) bad("empty x range");
  if (spec.noise_sd < 0.0) bad("negative noise level");
  if (spec.bumps.empty()) bad("no bumps");
  for (const Bump& b : spec.bumps) {
    if (!(b.width > 0.0)) bad("non-positive bump width");
  }
}

}  // namespace

double bump_value(const BumpSpec& spec, double x) {
  double y = 0.0;
  for (const Bump& b : spec.bumps) {
    const double d = (x - b.center) / b.width;
    y += b.height * std::exp(-0.5 * d * d);
  }
  return y;
}

FrameDataset gen_bump(const BumpSpec& spec) {
  check_bump_spec(spec);
  FrameDataset out;
  out.task = TaskKind::regression;
  out.features = Matrix(spec.n_points, 1);
  out.targets = Matrix(spec.n_points, 1);
  out.speaker_ids.assign(spec.n_points, 1);
  out.segment_ids.assign(spec.n_points, 1);
  Rng rng = make_rng(derive_seed(spec.seed, stream::kBump));
  std::uniform_real_distribution<double> ux(spec.x_lo, spec.x_hi);
  std::normal_distribution<double> un(0.0, 1.0);
  for (int t = 0; t < spec.n_points; ++t) {
    const double x = ux(rng);
    out.features(t, 0) = x;
    double y = bump_value(spec, x);
    if (spec.noise_sd > 0.0) y += spec.noise_sd * un(rng);
    out.targets(t, 0) = y;
  }
  return out;
}

FrameDataset gen_mixture_bump(const BumpSpec& a, const BumpSpec& b, int n_total,
                              std::uint64_t seed) {
  check_bump_spec(a);
  check_bump_spec(b);
  if (n_total < 0) {
    throw Error(ErrorCode::invalid_argument, "mixture: negative point count");
  }
  // Draw the speaker sequence first, then generate each speaker's frames as a
  // standalone bump dataset under a derived sub-seed and interleave.
  std::vector<bool> is_a(n_total);
  int count_a = 0;
  {
    Rng rng = make_rng(derive_seed(seed, stream::kMixtureAssign));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < n_total; ++t) {
      is_a[t] = u(rng) < 0.5;
      count_a += is_a[t] ? 1 : 0;
    }
  }
  BumpSpec sa = a;
  sa.n_points = count_a;
  sa.seed = derive_seed(seed, stream::kMixtureA);
  BumpSpec sb = b;
  sb.n_points = n_total - count_a;
  sb.seed = derive_seed(seed, stream::kMixtureB);
  const FrameDataset da = gen_bump(sa);
  const FrameDataset db = gen_bump(sb);

  FrameDataset out;
  out.task = TaskKind::regression;
  out.features = Matrix(n_total, 1);
  out.targets = Matrix(n_total, 1);
  out.speaker_ids.resize(n_total);
  out.segment_ids.resize(n_total);
  int ia = 0, ib = 0;
  for (int t = 0; t < n_total; ++t) {
    if (is_a[t]) {
      out.features(t, 0) = da.features(ia, 0);
      out.targets(t, 0) = da.targets(ia, 0);
      out.speaker_ids[t] = 1;
      out.segment_ids[t] = 1;
      ++ia;
    } else {
      out.features(t, 0) = db.features(ib, 0);
      out.targets(t, 0) = db.targets(ib, 0);
      out.speaker_ids[t] = 2;
      out.segment_ids[t] = 2;
      ++ib;
    }
  }
  return out;
}

namespace {

void check_cluster_spec(const ClusterTaskSpec& spec) {
  auto bad = [](const std::string& msg) {
    throw Error(ErrorCode::invalid_argument, "multicluster spec: " + msg);
  };
  if (spec.n_classes < 2) bad("need at least two classes");
  if (spec.feature_dim < spec.n_classes) {
    bad("feature_dim must be at least n_classes for the orthogonal class layout");
  }
  if (spec.n_speakers < 1) bad("need at least one training speaker");
  if (spec.n_heldout_speakers < 0) bad("negative held-out speaker count");
  if (spec.n_environments < 1) bad("need at least one environment");
  if (static_cast<int>(spec.env_noise_sd.size()) != spec.n_environments) {
    bad("env_noise_sd must list one level per environment");
  }
  for (double sd : spec.env_noise_sd) {
    if (sd < 0.0) bad("negative environment noise level");
  }
  if (spec.frames_per_speaker_per_env < 1) bad("need at least one frame per condition");
  if (spec.frames_per_segment < 1) bad("need at least one frame per segment");
  if (!(spec.speaker_warp_scale >= 0.0 && spec.speaker_warp_scale < 1.0)) {
    bad("speaker_warp_scale must be in [0, 1) to keep warps invertible");
  }
  if (!(spec.class_separation > 0.0)) bad("class separation must be positive");
  if (!(spec.label_corruption >= 0.0 && spec.label_corruption < 1.0)) {
    bad("label corruption must be in [0, 1)");
  }
}

Vector random_unit(Rng& rng, int dim) {
  std::normal_distribution<double> un(0.0, 1.0);
  Vector v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = un(rng);
      norm2 += v[i] * v[i];
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

// K mutually orthogonal unit directions in R^dim via Gram-Schmidt over seeded
// Gaussian draws; scaled rows become the class means.
Matrix orthogonal_frame(Rng& rng, int k, int dim) {
  Matrix frame(k, dim);
  std::normal_distribution<double> un(0.0, 1.0);
  for (int r = 0; r < k; ++r) {
    while (true) {
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = un(rng);
      for (int p = 0; p < r; ++p) {
        double dot = 0.0;
        for (int i = 0; i < dim; ++i) dot += v[i] * frame(p, i);
        for (int i = 0; i < dim; ++i) v[i] -= dot * frame(p, i);
      }
      double norm2 = 0.0;
      for (double x : v) norm2 += x * x;
      if (norm2 > 1e-10) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < dim; ++i) frame(r, i) = v[i] * inv;
        break;
      }
    }
  }
  return frame;
}

SpeakerWarp draw_warp(Rng& rng, int dim, double warp_scale) {
  SpeakerWarp w;
  w.A = Matrix(dim, dim);
  w.shift = Vector(dim, 0.0);
  std::normal_distribution<double> un(0.0, 1.0);
  Matrix r(dim, dim);
  double fro2 = 0.0;
  for (double& x : r.data) {
    x = un(rng);
    fro2 += x * x;
  }
  // ||R||_2 <= ||R||_F = warp_scale < 1 guarantees I + R invertible.
  const double scale = warp_scale > 0.0 ? warp_scale / std::sqrt(fro2) : 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      w.A(i, j) = (i == j ? 1.0 : 0.0) + scale * r(i, j);
    }
  }
  const Vector dir = random_unit(rng, dim);
  for (int i = 0; i < dim; ++i) w.shift[i] = warp_scale * dir[i];
  return w;
}

}  // namespace

MulticlusterData gen_multicluster(const ClusterTaskSpec& spec,
                                  std::uint64_t session) {
  check_cluster_spec(spec);
  MulticlusterData out;

  // Ground truth comes from the parameter stream only; the session salt never
  // touches it.
  Rng prng = make_rng(derive_seed(spec.seed, stream::kTaskParams));
  Matrix dirs = orthogonal_frame(prng, spec.n_classes, spec.feature_dim);
  out.truth.class_means = Matrix(spec.n_classes, spec.feature_dim);
  for (int k = 0; k < spec.n_classes; ++k) {
    for (int i = 0; i < spec.feature_dim; ++i) {
      out.truth.class_means(k, i) = spec.class_separation * dirs(k, i);
    }
  }
  const int total_speakers = spec.n_speakers + spec.n_heldout_speakers;
  for (int s = 1; s <= total_speakers; ++s) {
    out.truth.warps.emplace(s, draw_warp(prng, spec.feature_dim,
                                         spec.speaker_warp_scale));
  }
  for (int e = 0; e < spec.n_environments; ++e) {
    EnvModel env;
    env.noise_sd = spec.env_noise_sd[e];
    env.offset = Vector(spec.feature_dim, 0.0);
    const Vector dir = random_unit(prng, spec.feature_dim);
    for (int i = 0; i < spec.feature_dim; ++i) {
      env.offset[i] = env.noise_sd * dir[i];
    }
    out.truth.envs.push_back(std::move(env));
  }

  Rng frng = make_rng(
      derive_seed(derive_seed(spec.seed, stream::kTaskFrames), stream::kSession,
                  session));
  std::uniform_int_distribution<int> uclass(0, spec.n_classes - 1);
  std::normal_distribution<double> un(0.0, 1.0);

  auto generate = [&](int spk_lo, int spk_hi, int& segment_counter) {
    const int n_spk = spk_hi - spk_lo + 1;
    const int n = n_spk * spec.n_environments * spec.frames_per_speaker_per_env;
    FrameDataset d;
    d.task = TaskKind::classification;
    d.n_classes = spec.n_classes;
    d.features = Matrix(n, spec.feature_dim);
    d.labels.resize(n);
    d.speaker_ids.resize(n);
    d.segment_ids.resize(n);
    d.env_ids.resize(n);
    int t = 0;
    Vector x(spec.feature_dim);
    for (int s = spk_lo; s <= spk_hi; ++s) {
      const SpeakerWarp& w = out.truth.warps.at(s);
      for (int e = 0; e < spec.n_environments; ++e) {
        const EnvModel& env = out.truth.envs[e];
        for (int f = 0; f < spec.frames_per_speaker_per_env; ++f) {
          if (f % spec.frames_per_segment == 0) ++segment_counter;
          const int c = uclass(frng);
          for (int i = 0; i < spec.feature_dim; ++i) {
            x[i] = out.truth.class_means(c, i) + un(frng);
          }
          double* row = d.features.row(t).data();
          for (int i = 0; i < spec.feature_dim; ++i) {
            double acc = 0.0;
            for (int j = 0; j < spec.feature_dim; ++j) acc += w.A(i, j) * x[j];
            row[i] = acc + w.shift[i] + env.offset[i];
          }
          if (env.noise_sd > 0.0) {
            for (int i = 0; i < spec.feature_dim; ++i) {
              row[i] += env.noise_sd * un(frng);
            }
          }
          d.labels[t] = c;
          d.speaker_ids[t] = s;
          d.segment_ids[t] = segment_counter;
          d.env_ids[t] = e;
          ++t;
        }
      }
    }
    return d;
  };

  int segment_counter = 0;
  out.train = generate(1, spec.n_speakers, segment_counter);
  if (spec.n_heldout_speakers > 0) {
    out.test = generate(spec.n_speakers + 1, total_speakers, segment_counter);
  } else {
    out.test.task = TaskKind::classification;
    out.test.n_classes = spec.n_classes;
    out.test.features = Matrix(0, spec.feature_dim);
    out.test.env_ids = {};
  }
  if (spec.label_corruption > 0.0) {
    out.train.labels =
        corrupt_labels(out.train.labels, spec.n_classes, spec.label_corruption,
                       derive_seed(spec.seed, stream::kCorrupt));
  }
  return out;
}

std::vector<int> corrupt_labels(const std::vector<int>& labels, int n_classes,
                                double rate, std::uint64_t seed) {
  if (n_classes < 2) {
    throw Error(ErrorCode::invalid_argument,
                "corrupt_labels: need at least two classes");
  }
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "corrupt_labels: rate " + std::to_string(rate) +
                    " outside [0, 1)");
  }
  std::vector<int> out = labels;
  Rng rng = make_rng(derive_seed(seed, stream::kCorrupt));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> uw(0, n_classes - 2);
  for (std::size_t t = 0; t < out.size(); ++t) {
    if (out[t] < 0 || out[t] >= n_classes) {
      throw Error(ErrorCode::invalid_argument,
                  "corrupt_labels: label " + std::to_string(out[t]) +
                      " out of range");
    }
    if (u(rng) < rate) {
      int w = uw(rng);
      if (w >= out[t]) ++w;  // uniform over the wrong classes only
      out[t] = w;
    }
  }
  return out;
}

}  // namespace lhuc
