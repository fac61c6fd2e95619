// src/harness/gradcheck.cpp
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

#include "harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace lhuc {

namespace {

struct Problem {
  NetworkParams net;
  TransformBank bank;
  Matrix X;
  std::vector<int> labels;
  Matrix targets;
  std::vector<int> routes;
};

double problem_loss(const Problem& p) {
  const ForwardTrace trace = forward(p.net, p.bank, p.routes, p.X);
  if (p.net.output_kind == OutputKind::softmax_classifier) {
    return softmax_xent(trace.output, p.labels).loss;
  }
  return mse(trace.output, p.targets).loss;
}

Gradients problem_gradients(const Problem& p) {
  const ForwardTrace trace = forward(p.net, p.bank, p.routes, p.X);
  const LossGrad lg = p.net.output_kind == OutputKind::softmax_classifier
                          ? softmax_xent(trace.output, p.labels)
                          : mse(trace.output, p.targets);
  return backward(trace, p.net, &p.bank, lg.grad);
}

double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

// Central difference through *slot with the exactly realized step: the
// difference of the two perturbed values, not 2h, divides the loss gap, and
// both are carried in long double to keep the division itself exact.
double central_difference(const Problem& p, double* slot) {
  const double saved = *slot;
  const double h = 1e-6 * std::max(1.0, std::abs(saved));
  const double up_at = saved + h;
  const double down_at = saved - h;
  *slot = up_at;
  const long double up = problem_loss(p);
  *slot = down_at;
  const long double down = problem_loss(p);
  *slot = saved;
  return static_cast<double>((up - down) /
                             (static_cast<long double>(up_at) -
                              static_cast<long double>(down_at)));
}

Problem make_problem(std::uint64_t case_seed, int index) {
  std::mt19937_64 rng(case_seed);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::uniform_int_distribution<int> width_draw(2, 16);
  std::uniform_int_distribution<int> depth_draw(1, 3);
  std::uniform_int_distribution<int> input_draw(2, 6);
  std::uniform_int_distribution<int> out_draw(2, 5);
  std::uniform_int_distribution<int> batch_draw(6, 12);

  Problem p;
  std::vector<int> dims{input_draw(rng)};
  const int depth = depth_draw(rng);
  for (int l = 0; l < depth; ++l) dims.push_back(width_draw(rng));
  const bool classifier = index % 2 == 0;
  dims.push_back(classifier ? out_draw(rng) : out_draw(rng) - 1);

  p.net.output_kind = classifier ? OutputKind::softmax_classifier
                                 : OutputKind::linear_regressor;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    Layer layer;
    layer.W = Matrix(dims[k + 1], dims[k]);
    layer.b = Vector(static_cast<std::size_t>(dims[k + 1]));
    for (double& w : layer.W.data) w = u(rng);
    for (double& b : layer.b) b = u(rng);
    p.net.layers.push_back(std::move(layer));
  }

  // One reparametrisation per case, cycling through all four.
  const ReparamKind kinds[] = {ReparamKind::identity, ReparamKind::exp,
                               ReparamKind::sigmoid2, ReparamKind::relu};
  const ReparamKind kind = kinds[index % 4];
  const std::vector<int> cluster_ids{1, 2, 3};
  p.bank = init_bank(p.net, kind, cluster_ids);
  for (auto& [id, t] : p.bank.transforms) {
    for (Vector& amps : t.amps) {
      for (double& a : amps) {
        a = u(rng);
        // Keep relu amplitudes away from the kink so the central difference
        // stays on one side of it.
        if (kind == ReparamKind::relu && std::abs(a) < 0.05) {
          a = a < 0.0 ? a - 0.05 : a + 0.05;
        }
      }
    }
  }

  const int batch = batch_draw(rng);
  p.X = Matrix(batch, dims.front());
  for (double& x : p.X.data) x = u(rng);
  if (classifier) {
    std::uniform_int_distribution<int> label_draw(0, dims.back() - 1);
    for (int t = 0; t < batch; ++t) p.labels.push_back(label_draw(rng));
  } else {
    p.targets = Matrix(batch, dims.back());
    for (double& t : p.targets.data) t = u(rng);
  }
  // Mixed-cluster batch: every frame routed to the SI cluster or one of the
  // speaker clusters at random.
  std::uniform_int_distribution<int> route_draw(0, 3);
  for (int t = 0; t < batch; ++t) p.routes.push_back(route_draw(rng));
  return p;
}

GradcheckCase check_case(std::uint64_t case_seed, int index) {
  Problem p = make_problem(case_seed, index);

  GradcheckCase result;
  result.index = index;
  result.dims.push_back(p.net.input_dim());
  for (int l = 0; l < p.net.n_hidden(); ++l) {
    result.dims.push_back(p.net.hidden_width(l));
  }
  result.dims.push_back(p.net.output_dim());
  result.reparam = to_string(p.bank.kind);
  result.output = p.net.output_kind == OutputKind::softmax_classifier
                      ? "classifier"
                      : "regressor";

  const Gradients analytic = problem_gradients(p);

  for (std::size_t l = 0; l < p.net.layers.size(); ++l) {
    Layer& layer = p.net.layers[l];
    for (std::size_t i = 0; i < layer.W.data.size(); ++i) {
      const double num = central_difference(p, &layer.W.data[i]);
      result.max_rel_theta = std::max(
          result.max_rel_theta, rel_err(analytic.theta[l].W.data[i], num));
    }
    for (std::size_t i = 0; i < layer.b.size(); ++i) {
      const double num = central_difference(p, &layer.b[i]);
      result.max_rel_theta =
          std::max(result.max_rel_theta, rel_err(analytic.theta[l].b[i], num));
    }
  }

  for (auto& [id, t] : p.bank.transforms) {
    const bool routed =
        std::find(p.routes.begin(), p.routes.end(), id) != p.routes.end();
    if (!routed) continue;
    for (std::size_t l = 0; l < t.amps.size(); ++l) {
      for (std::size_t i = 0; i < t.amps[l].size(); ++i) {
        const double num = central_difference(p, &t.amps[l][i]);
        result.max_rel_amp = std::max(
            result.max_rel_amp, rel_err(analytic.amp.at(id)[l][i], num));
      }
    }
  }
  return result;
}

}  // namespace

GradcheckReport run_gradcheck(std::uint64_t seed, int cases) {
  GradcheckReport report;
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t case_seed =
        derive_seed(seed, stream::kGradcheck, static_cast<std::uint64_t>(i));
    GradcheckCase c = check_case(case_seed, i);
    report.max_rel_theta = std::max(report.max_rel_theta, c.max_rel_theta);
    report.max_rel_amp = std::max(report.max_rel_amp, c.max_rel_amp);
    report.cases.push_back(std::move(c));
  }
  report.pass = report.max_rel() <= report.tolerance;
  return report;
}

}  // namespace lhuc
