// src/core/model.cpp
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

#include "core/model.hpp"

#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lhuc {

const char* to_string(ReparamKind kind) {
  switch (kind) {
    case ReparamKind::identity: return "identity";
    case ReparamKind::exp: return "exp";
    case ReparamKind::sigmoid2: return "sigmoid2";
    case ReparamKind::relu: return "relu";
  }
  return "?";
}

ReparamKind reparam_kind_from_string(const std::string& name) {
  if (name == "identity") return ReparamKind::identity;
  if (name == "exp") return ReparamKind::exp;
  if (name == "sigmoid2") return ReparamKind::sigmoid2;
  if (name == "relu") return ReparamKind::relu;
  throw Error(ErrorCode::config, "unknown reparametrisation '" + name + "'");
}

ReparamOut reparam(ReparamKind kind, const Vector& amp) {
  ReparamOut out;
  out.scale.resize(amp.size());
  out.dscale.resize(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double a = amp[i];
    switch (kind) {
      case ReparamKind::identity:
        out.scale[i] = a;
        out.dscale[i] = 1.0;
        break;
      case ReparamKind::exp: {
        const double e = std::exp(a);
        out.scale[i] = e;
        out.dscale[i] = e;
        break;
      }
      case ReparamKind::sigmoid2: {
        const double s = 2.0 * sigmoid(a);
        out.scale[i] = s;
        out.dscale[i] = s * (1.0 - 0.5 * s);
        break;
      }
      case ReparamKind::relu:
        out.scale[i] = a > 0.0 ? a : 0.0;
        out.dscale[i] = a > 0.0 ? 1.0 : 0.0;
        break;
    }
  }
  return out;
}

double reparam_init_amp(ReparamKind kind) {
  switch (kind) {
    case ReparamKind::identity: return 1.0;
    case ReparamKind::exp: return 0.0;
    case ReparamKind::sigmoid2: return 0.0;
    case ReparamKind::relu: return 1.0;
  }
  return 0.0;
}

void NetworkParams::validate() const {
  if (layers.empty()) {
    throw Error(ErrorCode::shape, "network: no layers");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& l = layers[k];
    if (l.W.rows < 1 || l.W.cols < 1) {
      throw Error(ErrorCode::shape,
                  "network: layer " + std::to_string(k) + " has empty weights");
    }
    if (static_cast<int>(l.b.size()) != l.W.rows) {
      throw Error(ErrorCode::shape,
                  "network: layer " + std::to_string(k) + " bias size " +
                      std::to_string(l.b.size()) + " vs " +
                      std::to_string(l.W.rows) + " units");
    }
    if (k > 0 && layers[k - 1].W.rows != l.W.cols) {
      throw Error(ErrorCode::shape,
                  "network: layer " + std::to_string(k) + " expects " +
                      std::to_string(l.W.cols) + " inputs but layer " +
                      std::to_string(k - 1) + " has " +
                      std::to_string(layers[k - 1].W.rows) + " units");
    }
  }
}

NetworkParams init_network(const std::vector<int>& dims, OutputKind output_kind,
                           std::uint64_t seed) {
  if (dims.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "init_network: need at least input and output dims");
  }
  for (int d : dims) {
    if (d < 1) {
      throw Error(ErrorCode::invalid_argument, "init_network: non-positive dim");
    }
  }
  NetworkParams net;
  net.output_kind = output_kind;
  Rng rng = make_rng(derive_seed(seed, stream::kWeightInit));
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    Layer l;
    l.W = Matrix(dims[k + 1], dims[k]);
    l.b = Vector(dims[k + 1], 0.0);
    const double limit = std::sqrt(6.0 / (dims[k] + dims[k + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : l.W.data) w = u(rng);
    net.layers.push_back(std::move(l));
  }
  return net;
}

LhucTransform init_transform(const NetworkParams& net, ReparamKind kind) {
  net.validate();
  LhucTransform t;
  t.kind = kind;
  const double a0 = reparam_init_amp(kind);
  for (int l = 0; l < net.n_hidden(); ++l) {
    t.amps.emplace_back(net.hidden_width(l), a0);
  }
  return t;
}

TransformBank init_bank(const NetworkParams& net, ReparamKind kind,
                        std::span<const int> cluster_ids) {
  TransformBank bank;
  bank.kind = kind;
  bank.transforms[0] = init_transform(net, kind);
  for (int c : cluster_ids) {
    if (c < 0) {
      throw Error(ErrorCode::invalid_argument,
                  "init_bank: negative cluster id " + std::to_string(c));
    }
    bank.transforms[c] = init_transform(net, kind);
  }
  return bank;
}

EffectiveScale to_scale(const LhucTransform& t) {
  EffectiveScale s;
  for (const Vector& a : t.amps) s.scale.push_back(reparam(t.kind, a).scale);
  return s;
}

namespace {

void check_transform(const NetworkParams& net, const LhucTransform& t,
                     const std::string& what) {
  if (static_cast<int>(t.amps.size()) != net.n_hidden()) {
    throw Error(ErrorCode::shape,
                what + ": transform covers " + std::to_string(t.amps.size()) +
                    " hidden layers, network has " +
                    std::to_string(net.n_hidden()));
  }
  for (int l = 0; l < net.n_hidden(); ++l) {
    if (static_cast<int>(t.amps[l].size()) != net.hidden_width(l)) {
      throw Error(ErrorCode::shape,
                  what + ": transform layer " + std::to_string(l) + " has " +
                      std::to_string(t.amps[l].size()) + " amplitudes for " +
                      std::to_string(net.hidden_width(l)) + " units");
    }
  }
}

enum class ScaleMode { none, bank, uniform };

// Shared forward worker.  In bank mode each frame uses the scale of its
// routed cluster; in uniform mode one per-layer scale vector applies to every
// frame.
ForwardTrace forward_impl(const NetworkParams& net, const Matrix& X,
                          const TransformBank* bank, std::span<const int> routes,
                          const std::vector<Vector>* uniform_scale) {
  net.validate();
  if (X.cols != net.input_dim()) {
    throw Error(ErrorCode::shape, "forward: input " + shape_str(X) +
                                      " but network expects " +
                                      std::to_string(net.input_dim()) +
                                      " features");
  }
  const int L = net.n_hidden();
  const ScaleMode mode = bank           ? ScaleMode::bank
                         : uniform_scale ? ScaleMode::uniform
                                         : ScaleMode::none;

  // Per-cluster applied scales, computed once per distinct routed cluster.
  std::map<int, std::vector<Vector>> cluster_scales;
  if (mode == ScaleMode::bank) {
    if (static_cast<int>(routes.size()) != X.rows) {
      throw Error(ErrorCode::shape,
                  "forward: " + std::to_string(routes.size()) + " routes for " +
                      std::to_string(X.rows) + " frames");
    }
    for (int c : routes) {
      if (cluster_scales.count(c)) continue;
      auto it = bank->transforms.find(c);
      if (it == bank->transforms.end()) {
        throw Error(ErrorCode::invalid_argument,
                    "forward: unknown cluster id " + std::to_string(c) +
                        " in routes");
      }
      check_transform(net, it->second, "forward");
      std::vector<Vector> per_layer;
      for (const Vector& a : it->second.amps) {
        per_layer.push_back(reparam(bank->kind, a).scale);
      }
      cluster_scales.emplace(c, std::move(per_layer));
    }
  } else if (mode == ScaleMode::uniform) {
    if (static_cast<int>(uniform_scale->size()) != L) {
      throw Error(ErrorCode::shape,
                  "forward: scale covers " +
                      std::to_string(uniform_scale->size()) +
                      " hidden layers, network has " + std::to_string(L));
    }
    for (int l = 0; l < L; ++l) {
      if (static_cast<int>((*uniform_scale)[l].size()) != net.hidden_width(l)) {
        throw Error(ErrorCode::shape,
                    "forward: scale layer " + std::to_string(l) + " has " +
                        std::to_string((*uniform_scale)[l].size()) +
                        " entries for " + std::to_string(net.hidden_width(l)) +
                        " units");
      }
    }
  }

  ForwardTrace tr;
  tr.input = X;
  tr.scaled = mode != ScaleMode::none;
  tr.routes.assign(routes.begin(), routes.end());
  tr.pre.reserve(L);
  tr.basis.reserve(L);
  tr.hidden.reserve(L);
  if (tr.scaled) tr.scales.reserve(L);

  const Matrix* h = &tr.input;
  for (int l = 0; l < L; ++l) {
    Matrix z = affine(net.layers[l].W, net.layers[l].b, *h);
    Matrix psi = activate(net.hidden_activation, z);
    Matrix out;
    if (mode == ScaleMode::none) {
      out = psi;
    } else {
      Matrix s(psi.rows, psi.cols);
      for (int t = 0; t < psi.rows; ++t) {
        const Vector& sv = mode == ScaleMode::bank
                               ? cluster_scales.at(routes[t])[l]
                               : (*uniform_scale)[l];
        double* srow = s.data.data() + static_cast<std::size_t>(t) * s.cols;
        for (int j = 0; j < psi.cols; ++j) srow[j] = sv[j];
      }
      out = Matrix(psi.rows, psi.cols);
      for (std::size_t i = 0; i < psi.data.size(); ++i) {
        out.data[i] = psi.data[i] * s.data[i];
      }
      tr.scales.push_back(std::move(s));
    }
    tr.pre.push_back(std::move(z));
    tr.basis.push_back(std::move(psi));
    tr.hidden.push_back(std::move(out));
    h = &tr.hidden.back();
  }
  tr.output = affine(net.layers[L].W, net.layers[L].b, *h);
  return tr;
}

}  // namespace

ForwardTrace forward(const NetworkParams& net, const Matrix& X) {
  return forward_impl(net, X, nullptr, {}, nullptr);
}

ForwardTrace forward(const NetworkParams& net, const TransformBank& bank,
                     std::span<const int> routes, const Matrix& X) {
  return forward_impl(net, X, &bank, routes, nullptr);
}

ForwardTrace forward(const NetworkParams& net, const LhucTransform& t,
                     const Matrix& X) {
  check_transform(net, t, "forward");
  EffectiveScale s = to_scale(t);
  return forward_impl(net, X, nullptr, {}, &s.scale);
}

ForwardTrace forward(const NetworkParams& net, const EffectiveScale& s,
                     const Matrix& X) {
  return forward_impl(net, X, nullptr, {}, &s.scale);
}

Gradients backward(const ForwardTrace& tr, const NetworkParams& net,
                   const TransformBank* bank, const Matrix& loss_grad) {
  net.validate();
  const int L = net.n_hidden();
  const int batch = tr.input.rows;
  auto trace_mismatch = [](const std::string& msg) {
    throw Error(ErrorCode::shape, "backward: trace does not match network (" +
                                      msg + ")");
  };
  if (static_cast<int>(tr.basis.size()) != L ||
      static_cast<int>(tr.hidden.size()) != L ||
      static_cast<int>(tr.pre.size()) != L) {
    trace_mismatch("trace has " + std::to_string(tr.basis.size()) +
                   " hidden layers, network has " + std::to_string(L));
  }
  if (tr.input.cols != net.input_dim()) trace_mismatch("input width");
  for (int l = 0; l < L; ++l) {
    if (tr.basis[l].cols != net.hidden_width(l) || tr.basis[l].rows != batch) {
      trace_mismatch("hidden layer " + std::to_string(l) + " shape");
    }
  }
  if (tr.scaled && static_cast<int>(tr.scales.size()) != L) {
    trace_mismatch("scaled trace carries no scales");
  }
  if (!loss_grad.same_shape(tr.output) || tr.output.cols != net.output_dim() ||
      tr.output.rows != batch) {
    throw Error(ErrorCode::shape,
                "backward: loss gradient " + shape_str(loss_grad) +
                    " vs network output " + std::to_string(batch) + "x" +
                    std::to_string(net.output_dim()));
  }

  Gradients g;
  g.theta.resize(net.layers.size());

  // Amplitude gradients: zero entries for every bank cluster up front, so
  // clusters with no routed frames report exact zeros.
  const bool want_amp = bank != nullptr;
  std::map<int, std::vector<Vector>> dscales;
  if (want_amp) {
    if (static_cast<int>(tr.routes.size()) != batch) {
      throw Error(ErrorCode::invalid_argument,
                  "backward: bank given but trace carries no routes");
    }
    for (const auto& [c, t] : bank->transforms) {
      std::vector<Vector> zeros;
      for (int l = 0; l < L; ++l) zeros.emplace_back(net.hidden_width(l), 0.0);
      g.amp.emplace(c, std::move(zeros));
    }
    for (int c : tr.routes) {
      if (dscales.count(c)) continue;
      auto it = bank->transforms.find(c);
      if (it == bank->transforms.end()) {
        throw Error(ErrorCode::invalid_argument,
                    "backward: unknown cluster id " + std::to_string(c) +
                        " in trace routes");
      }
      std::vector<Vector> per_layer;
      for (const Vector& a : it->second.amps) {
        per_layer.push_back(reparam(bank->kind, a).dscale);
      }
      dscales.emplace(c, std::move(per_layer));
    }
  }

  Matrix d = loss_grad;  // gradient w.r.t. the output of affine layer k
  for (int k = L; k >= 0; --k) {
    const Matrix& A = (k == 0) ? tr.input : tr.hidden[k - 1];
    const Layer& layer = net.layers[k];
    Layer& gl = g.theta[k];
    gl.W = Matrix(layer.W.rows, layer.W.cols);
    gl.b = Vector(layer.b.size(), 0.0);
    for (int t = 0; t < batch; ++t) {
      const double* drow = d.data.data() + static_cast<std::size_t>(t) * d.cols;
      const double* arow = A.data.data() + static_cast<std::size_t>(t) * A.cols;
      for (int j = 0; j < layer.W.rows; ++j) {
        const double dv = drow[j];
        gl.b[j] += dv;
        double* wrow = gl.W.data.data() + static_cast<std::size_t>(j) * gl.W.cols;
        for (int i = 0; i < layer.W.cols; ++i) wrow[i] += dv * arow[i];
      }
    }
    if (k == 0) break;

    // Gradient w.r.t. the scaled hidden output of layer k-1.
    const int l = k - 1;
    const int width = net.hidden_width(l);
    Matrix dh(batch, width);
    for (int t = 0; t < batch; ++t) {
      const double* drow = d.data.data() + static_cast<std::size_t>(t) * d.cols;
      double* hrow = dh.data.data() + static_cast<std::size_t>(t) * dh.cols;
      for (int j = 0; j < layer.W.rows; ++j) {
        const double dv = drow[j];
        const double* wrow =
            layer.W.data.data() + static_cast<std::size_t>(j) * layer.W.cols;
        for (int i = 0; i < width; ++i) hrow[i] += dv * wrow[i];
      }
    }

    // Through the per-frame scaling: dL/dbasis = dL/dh * scale, and the
    // amplitude gradient of the routed cluster accumulates
    // dL/dh * dscale * basis over ascending frame index.
    Matrix dpsi(batch, width);
    if (tr.scaled) {
      const Matrix& s = tr.scales[l];
      for (std::size_t i = 0; i < dpsi.data.size(); ++i) {
        dpsi.data[i] = dh.data[i] * s.data[i];
      }
      if (want_amp) {
        for (int t = 0; t < batch; ++t) {
          const int c = tr.routes[t];
          Vector& gv = g.amp.at(c)[l];
          const Vector& ds = dscales.at(c)[l];
          const double* hrow = dh.data.data() + static_cast<std::size_t>(t) * dh.cols;
          const double* prow =
              tr.basis[l].data.data() + static_cast<std::size_t>(t) * width;
          for (int j = 0; j < width; ++j) gv[j] += hrow[j] * ds[j] * prow[j];
        }
      }
    } else {
      dpsi = dh;
    }

    // Through the activation.
    d = Matrix(batch, width);
    if (net.hidden_activation == Activation::sigmoid) {
      const Matrix& psi = tr.basis[l];
      for (std::size_t i = 0; i < d.data.size(); ++i) {
        const double p = psi.data[i];
        d.data[i] = dpsi.data[i] * p * (1.0 - p);
      }
    } else {
      d = dpsi;
    }
  }
  return g;
}

ParamCount count_parameters(const NetworkParams& net, const TransformBank* bank) {
  net.validate();
  ParamCount out;
  for (const Layer& l : net.layers) {
    out.si += static_cast<long long>(l.W.rows) * l.W.cols + l.b.size();
  }
  if (bank) {
    for (int l = 0; l < net.n_hidden(); ++l) out.per_cluster += net.hidden_width(l);
  }
  return out;
}

}  // namespace lhuc
