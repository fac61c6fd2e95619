// tests/oracle/refnet.hpp
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
// Self-contained scalar reference for the bump-adaptation demo.  Nothing here
// touches the library: data generation, the 1-4-1 sigmoid network, training
// and amplitude adaptation are all re-derived from first principles so the
// acceptance thresholds frozen from a run of this code are an independent
// stake in the ground.

#ifndef LHUC_TESTS_ORACLE_REFNET_HPP_
#define LHUC_TESTS_ORACLE_REFNET_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace refnet {

struct RefBump {
  double center, width, height;
};

struct RefData {
  std::vector<double> x, y;
};

inline double target_of(const std::vector<RefBump>& bumps, double x) {
  double v = 0.0;
  for (const RefBump& b : bumps) {
    const double z = (x - b.center) / b.width;
    v += b.height * std::exp(-0.5 * z * z);
  }
  return v;
}

inline RefData make_data(const std::vector<RefBump>& bumps, int n,
                         double noise_sd, std::uint64_t seed,
                         double lo = -3.0, double hi = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo, hi);
  std::normal_distribution<double> un(0.0, 1.0);
  RefData d;
  for (int i = 0; i < n; ++i) {
    const double x = ux(rng);
    d.x.push_back(x);
    d.y.push_back(target_of(bumps, x) + noise_sd * un(rng));
  }
  return d;
}

constexpr int kUnits = 4;

struct RefNet {
  std::array<double, kUnits> w1{}, b1{}, w2{};
  double b2 = 0.0;
};

inline double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// r == nullptr: plain forward; otherwise unit j is scaled by r[j] directly
// (identity amplitude parametrisation: the combination weights are free reals).
inline double ref_forward(const RefNet& net, const double* r, double x) {
  double y = net.b2;
  for (int j = 0; j < kUnits; ++j) {
    double h = sigm(net.w1[j] * x + net.b1[j]);
    if (r != nullptr) h *= r[j];
    y += net.w2[j] * h;
  }
  return y;
}

inline double ref_mse(const RefNet& net, const double* r, const RefData& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double e = ref_forward(net, r, d.x[i]) - d.y[i];
    acc += e * e;
  }
  return acc / static_cast<double>(d.x.size());
}

// Full-batch gradient descent on all weights and biases.
inline void ref_train(RefNet& net, const RefData& d, double lr, int iters) {
  const double n = static_cast<double>(d.x.size());
  for (int it = 0; it < iters; ++it) {
    std::array<double, kUnits> gw1{}, gb1{}, gw2{};
    double gb2 = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const double x = d.x[i];
      std::array<double, kUnits> h;
      double y = net.b2;
      for (int j = 0; j < kUnits; ++j) {
        h[j] = sigm(net.w1[j] * x + net.b1[j]);
        y += net.w2[j] * h[j];
      }
      const double dy = 2.0 * (y - d.y[i]) / n;
      gb2 += dy;
      for (int j = 0; j < kUnits; ++j) {
        gw2[j] += dy * h[j];
        const double dh = dy * net.w2[j] * h[j] * (1.0 - h[j]);
        gw1[j] += dh * x;
        gb1[j] += dh;
      }
    }
    for (int j = 0; j < kUnits; ++j) {
      net.w1[j] -= lr * gw1[j];
      net.b1[j] -= lr * gb1[j];
      net.w2[j] -= lr * gw2[j];
    }
    net.b2 -= lr * gb2;
  }
}

// Mini-batch SGD with a newbob-style schedule: hold out the last tenth of the
// data for CV, keep the learning rate while the relative CV improvement stays
// at or above `ramp`, halve it below that, and stop once improvement falls
// under `stop` after the first halving.  Keeps the weights in the moderate
// regime an early-stopped run produces.  Returns epochs used; net holds the
// best-CV parameters.
inline int ref_train_newbob(RefNet& net, const RefData& d, double lr0,
                            int batch, int max_epochs, std::uint64_t seed,
                            double ramp = 0.005, double stop = 0.0005) {
  const std::size_t n_cv = d.x.size() / 10;
  const std::size_t n_tr = d.x.size() - n_cv;
  RefData cv;
  cv.x.assign(d.x.begin() + n_tr, d.x.end());
  cv.y.assign(d.y.begin() + n_tr, d.y.end());

  std::vector<std::size_t> order(n_tr);
  for (std::size_t i = 0; i < n_tr; ++i) order[i] = i;
  std::mt19937_64 rng(seed);

  RefNet best = net;
  double best_cv = 0.0;
  double lr = lr0;
  int halvings = 0, epoch = 0;
  bool has_prev = false;
  for (; epoch < max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t at = 0; at < n_tr; at += batch) {
      RefData mb;
      for (std::size_t i = at; i < std::min(at + batch, n_tr); ++i) {
        mb.x.push_back(d.x[order[i]]);
        mb.y.push_back(d.y[order[i]]);
      }
      ref_train(net, mb, lr, 1);
    }
    const double cur = ref_mse(net, nullptr, cv);
    if (!has_prev || cur < best_cv) best = net;
    if (!has_prev) {
      has_prev = true;
      best_cv = cur;
      continue;
    }
    const double improvement = (best_cv - cur) / std::max(std::fabs(best_cv), 1e-12);
    if (cur < best_cv) best_cv = cur;
    if (improvement >= ramp) continue;
    if (improvement < stop && halvings > 0) break;
    ++halvings;
    lr *= 0.5;
  }
  net = best;
  return epoch;
}

inline double sig2(double a) { return 2.0 / (1.0 + std::exp(-a)); }

// Full-batch gradient descent on pre-squash amplitudes under the bounded
// (0,2) sigmoid re-parametrisation; d xi / d a = xi * (1 - xi/2) vanishes as
// the scale saturates, so the iteration is self-limiting.
inline void ref_adapt_sig2(std::array<double, kUnits>& a, const RefNet& net,
                           const RefData& d, double lr, int iters) {
  const double n = static_cast<double>(d.x.size());
  for (int it = 0; it < iters; ++it) {
    std::array<double, kUnits> ga{};
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const double x = d.x[i];
      std::array<double, kUnits> psi, xi;
      double y = net.b2;
      for (int j = 0; j < kUnits; ++j) {
        psi[j] = sigm(net.w1[j] * x + net.b1[j]);
        xi[j] = sig2(a[j]);
        y += net.w2[j] * xi[j] * psi[j];
      }
      const double dy = 2.0 * (y - d.y[i]) / n;
      for (int j = 0; j < kUnits; ++j)
        ga[j] += dy * net.w2[j] * psi[j] * xi[j] * (1.0 - 0.5 * xi[j]);
    }
    for (int j = 0; j < kUnits; ++j) a[j] -= lr * ga[j];
  }
}

// Full-batch gradient descent on the amplitudes only (identity
// parametrisation, so the objective is a convex quadratic in r).
inline void ref_adapt(std::array<double, kUnits>& r, const RefNet& net,
                      const RefData& d, double lr, int iters) {
  const double n = static_cast<double>(d.x.size());
  for (int it = 0; it < iters; ++it) {
    std::array<double, kUnits> gr{};
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const double x = d.x[i];
      std::array<double, kUnits> psi;
      double y = net.b2;
      for (int j = 0; j < kUnits; ++j) {
        psi[j] = sigm(net.w1[j] * x + net.b1[j]);
        y += net.w2[j] * psi[j] * r[j];
      }
      const double dy = 2.0 * (y - d.y[i]) / n;
      // d y / d r_j = w2_j * psi_j.
      for (int j = 0; j < kUnits; ++j) gr[j] += dy * net.w2[j] * psi[j];
    }
    for (int j = 0; j < kUnits; ++j) r[j] -= lr * gr[j];
  }
}

}  // namespace refnet

#endif  // LHUC_TESTS_ORACLE_REFNET_HPP_
