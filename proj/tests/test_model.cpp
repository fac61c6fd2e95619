// tests/test_model.cpp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/tensor.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace lhuc;
using namespace lhuc::testutil;

namespace {

const std::vector<ReparamKind> kAllKinds{
    ReparamKind::identity, ReparamKind::exp, ReparamKind::sigmoid2,
    ReparamKind::relu};

}  // namespace

TEST_CASE("reparam: hand values for every kind") {
  // identity
  ReparamOut r = reparam(ReparamKind::identity, {0.7, -2.0});
  CHECK(r.scale[0] == 0.7);
  CHECK(r.scale[1] == -2.0);
  CHECK(r.dscale[0] == 1.0);
  CHECK(r.dscale[1] == 1.0);
  // exp
  r = reparam(ReparamKind::exp, {0.0, 1.0});
  CHECK(r.scale[0] == 1.0);
  CHECK(r.scale[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(r.dscale[1] == r.scale[1]);
  // sigmoid2: xi(0) = 1 exactly, dxi(0) = 1*(1-0.5) = 0.5
  r = reparam(ReparamKind::sigmoid2, {0.0});
  CHECK(r.scale[0] == 1.0);
  CHECK(r.dscale[0] == 0.5);
  // relu: clamps below zero, derivative 0 at and below the kink
  r = reparam(ReparamKind::relu, {-1.0, 0.0, 2.0});
  CHECK(r.scale[0] == 0.0);
  CHECK(r.dscale[0] == 0.0);
  CHECK(r.scale[1] == 0.0);
  CHECK(r.dscale[1] == 0.0);
  CHECK(r.scale[2] == 2.0);
  CHECK(r.dscale[2] == 1.0);
}

TEST_CASE("reparam: sigmoid2 scales stay inside (0, 2)") {
  std::mt19937_64 rng(21);
  Vector amps = random_vector(rng, 200, -30.0, 30.0);
  ReparamOut r = reparam(ReparamKind::sigmoid2, amps);
  for (double s : r.scale) {
    CHECK(s > 0.0);
    CHECK(s < 2.0);
  }
  // At extreme raw amplitudes the scale saturates but never escapes [0, 2].
  r = reparam(ReparamKind::sigmoid2, {-1e6, 1e6});
  CHECK(r.scale[0] >= 0.0);
  CHECK(r.scale[1] <= 2.0);
  CHECK(std::isfinite(r.dscale[0]));
  CHECK(std::isfinite(r.dscale[1]));
}

TEST_CASE("reparam: initial amplitude gives scale exactly 1 for every kind") {
  for (ReparamKind kind : kAllKinds) {
    ReparamOut r = reparam(kind, {reparam_init_amp(kind)});
    CHECK(r.scale[0] == 1.0);
  }
}

TEST_CASE("reparam: kind names round-trip, unknown name rejected") {
  for (ReparamKind kind : kAllKinds) {
    CHECK(reparam_kind_from_string(to_string(kind)) == kind);
  }
  try {
    reparam_kind_from_string("tanhish");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("tanhish") != std::string::npos);
  }
}

TEST_CASE("init_network: seeded, bounded, zero biases, deterministic") {
  const std::vector<int> dims{5, 7, 4};
  NetworkParams a = init_network(dims, OutputKind::softmax_classifier, 42);
  NetworkParams b = init_network(dims, OutputKind::softmax_classifier, 42);
  NetworkParams c = init_network(dims, OutputKind::softmax_classifier, 43);
  CHECK(bit_equal(a, b));
  CHECK(!bit_equal(a, c));
  a.validate();
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    const Layer& l = a.layers[k];
    const double bound = std::sqrt(6.0 / (l.W.cols + l.W.rows));
    double max_w = 0.0;
    for (double w : l.W.data) max_w = std::max(max_w, std::abs(w));
    CHECK(max_w <= bound);
    CHECK(max_w > 0.0);
    for (double bias : l.b) CHECK(bias == 0.0);
  }
}

TEST_CASE("transform at initial amplitude leaves the forward pass bit-identical") {
  std::mt19937_64 rng(22);
  NetworkParams net = random_network(rng, {4, 6, 5, 3}, OutputKind::softmax_classifier);
  Matrix X = random_matrix(rng, 7, 4, -2.0, 2.0);
  ForwardTrace bare = forward(net, X);
  for (ReparamKind kind : kAllKinds) {
    LhucTransform t = init_transform(net, kind);
    ForwardTrace scaled = forward(net, t, X);
    CHECK(bit_equal(bare.output, scaled.output));
    for (int l = 0; l < net.n_hidden(); ++l) {
      CHECK(bit_equal(bare.hidden[static_cast<std::size_t>(l)],
                      scaled.hidden[static_cast<std::size_t>(l)]));
    }
  }
}

TEST_CASE("relu transform can hard-prune a layer") {
  std::mt19937_64 rng(23);
  NetworkParams net = random_network(rng, {3, 5, 4, 2}, OutputKind::softmax_classifier);
  LhucTransform t = init_transform(net, ReparamKind::relu);
  for (double& a : t.amps[0]) a = -1.0;  // scale 0 on the first hidden layer
  Matrix X = random_matrix(rng, 6, 3, -2.0, 2.0);
  ForwardTrace tr = forward(net, t, X);
  // Layer 0 outputs are exactly zero.
  for (double v : tr.hidden[0].data) CHECK(v == 0.0);
  // So the next pre-activation is exactly its bias for every frame.
  for (int r = 0; r < tr.pre[1].rows; ++r) {
    for (int c = 0; c < tr.pre[1].cols; ++c) {
      CHECK(tr.pre[1](r, c) == net.layers[1].b[static_cast<std::size_t>(c)]);
    }
  }
  // And the gradient w.r.t. the weights fed by the pruned layer is exactly 0.
  TransformBank bank;
  bank.kind = ReparamKind::relu;
  bank.transforms[0] = init_transform(net, ReparamKind::relu);
  bank.transforms[1] = t;
  std::vector<int> routes(6, 1);
  ForwardTrace tr2 = forward(net, bank, routes, X);
  std::vector<int> y{0, 1, 0, 1, 0, 1};
  LossGrad lg = softmax_xent(tr2.output, y);
  Gradients g = backward(tr2, net, &bank, lg.grad);
  for (double v : g.theta[1].W.data) CHECK(v == 0.0);
}

TEST_CASE("forward matches the scalar oracle for every kind and mixed routes") {
  std::mt19937_64 rng(24);
  for (ReparamKind kind : kAllKinds) {
    NetworkParams net = random_network(rng, {4, 8, 6, 5, 3}, OutputKind::softmax_classifier);
    TransformBank bank;
    bank.kind = kind;
    bank.transforms[0] = init_transform(net, kind);
    bank.transforms[1] = random_transform(rng, net, kind);
    bank.transforms[2] = random_transform(rng, net, kind);
    Matrix X = random_matrix(rng, 5, 4, -2.0, 2.0);
    std::vector<int> routes{1, 2, 0, 2, 1};
    ForwardTrace tr = forward(net, bank, routes, X);
    for (int t = 0; t < X.rows; ++t) {
      std::vector<double> x(X.row(t).begin(), X.row(t).end());
      const LhucTransform* which =
          routes[static_cast<std::size_t>(t)] == 0
              ? &bank.transforms.at(0)
              : &bank.transforms.at(routes[static_cast<std::size_t>(t)]);
      std::vector<double> ref = oracle::naive_forward_frame(net, which, x);
      for (int j = 0; j < tr.output.cols; ++j) {
        CHECK(std::abs(tr.output(t, j) - ref[static_cast<std::size_t>(j)]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("forward: unscaled pass matches oracle without transform") {
  std::mt19937_64 rng(25);
  NetworkParams net = random_network(rng, {6, 9, 4}, OutputKind::linear_regressor);
  Matrix X = random_matrix(rng, 4, 6, -2.0, 2.0);
  ForwardTrace tr = forward(net, X);
  CHECK(!tr.scaled);
  for (int t = 0; t < X.rows; ++t) {
    std::vector<double> x(X.row(t).begin(), X.row(t).end());
    std::vector<double> ref = oracle::naive_forward_frame(net, nullptr, x);
    for (int j = 0; j < tr.output.cols; ++j) {
      CHECK(std::abs(tr.output(t, j) - ref[static_cast<std::size_t>(j)]) <= 1e-12);
    }
  }
}

TEST_CASE("forward: unknown cluster id raises invalid_argument naming the id") {
  std::mt19937_64 rng(26);
  NetworkParams net = random_network(rng, {3, 4, 2}, OutputKind::softmax_classifier);
  TransformBank bank = init_bank(net, ReparamKind::exp, std::vector<int>{1, 2});
  Matrix X = random_matrix(rng, 2, 3);
  std::vector<int> routes{1, 7};
  try {
    forward(net, bank, routes, X);
    FAIL("expected invalid_argument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}

TEST_CASE("forward: route count must match the batch") {
  std::mt19937_64 rng(27);
  NetworkParams net = random_network(rng, {3, 4, 2}, OutputKind::softmax_classifier);
  TransformBank bank = init_bank(net, ReparamKind::exp, std::vector<int>{1});
  Matrix X = random_matrix(rng, 3, 3);
  std::vector<int> routes{1, 1};
  try {
    forward(net, bank, routes, X);
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape);
  }
}

TEST_CASE("forward: repeated calls are bit-identical") {
  std::mt19937_64 rng(28);
  NetworkParams net = random_network(rng, {4, 5, 3}, OutputKind::softmax_classifier);
  TransformBank bank = init_bank(net, ReparamKind::sigmoid2, std::vector<int>{1, 2});
  Matrix X = random_matrix(rng, 10, 4);
  std::vector<int> routes{1, 2, 0, 1, 2, 0, 1, 2, 0, 1};
  ForwardTrace a = forward(net, bank, routes, X);
  ForwardTrace b = forward(net, bank, routes, X);
  CHECK(bit_equal(a.output, b.output));
}

TEST_CASE("effective-scale forward agrees bit-exactly with transform forward") {
  std::mt19937_64 rng(29);
  NetworkParams net = random_network(rng, {4, 6, 5, 3}, OutputKind::softmax_classifier);
  Matrix X = random_matrix(rng, 5, 4);
  for (ReparamKind kind : kAllKinds) {
    LhucTransform t = random_transform(rng, net, kind);
    ForwardTrace via_transform = forward(net, t, X);
    ForwardTrace via_scale = forward(net, to_scale(t), X);
    CHECK(bit_equal(via_transform.output, via_scale.output));
    // Routing every frame to the same cluster is the same computation.
    TransformBank bank;
    bank.kind = kind;
    bank.transforms[0] = init_transform(net, kind);
    bank.transforms[3] = t;
    std::vector<int> routes(5, 3);
    ForwardTrace via_bank = forward(net, bank, routes, X);
    CHECK(bit_equal(via_transform.output, via_bank.output));
  }
}

namespace {

// Finite-difference check of every parameter group against backward(), with
// the long-double scalar pipeline as the numeric reference (h = 1e-6).
// Returns the max relative error observed.
double fd_check(NetworkParams net, TransformBank bank, const Matrix& X,
                const std::vector<int>& routes, const std::vector<int>& labels,
                const Matrix* targets) {
  auto loss_of = [&]() {
    return oracle::ld_loss(net, &bank, routes, X, labels, targets);
  };
  ForwardTrace tr = forward(net, bank, routes, X);
  LossGrad lg = targets != nullptr ? mse(tr.output, *targets)
                                   : softmax_xent(tr.output, labels);
  Gradients g = backward(tr, net, &bank, lg.grad);
  double worst = 0.0;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    for (std::size_t i = 0; i < net.layers[k].W.data.size(); ++i) {
      const double num = oracle::ld_central_diff(loss_of, &net.layers[k].W.data[i]);
      worst = std::max(worst, rel_err(g.theta[k].W.data[i], num));
    }
    for (std::size_t i = 0; i < net.layers[k].b.size(); ++i) {
      const double num = oracle::ld_central_diff(loss_of, &net.layers[k].b[i]);
      worst = std::max(worst, rel_err(g.theta[k].b[i], num));
    }
  }
  for (auto& [cid, t] : bank.transforms) {
    for (std::size_t l = 0; l < t.amps.size(); ++l) {
      for (std::size_t i = 0; i < t.amps[l].size(); ++i) {
        const double num = oracle::ld_central_diff(loss_of, &t.amps[l][i]);
        worst = std::max(worst, rel_err(g.amp.at(cid)[l][i], num));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("backward matches finite differences for every reparametrisation") {
  std::mt19937_64 rng(121);
  Matrix X = random_matrix(rng, 5, 3, -1.5, 1.5);
  std::vector<int> routes{1, 2, 0, 1, 2};
  std::vector<int> labels{0, 1, 2, 1, 0};
  for (ReparamKind kind : kAllKinds) {
    NetworkParams net = random_network(rng, {3, 5, 4, 3}, OutputKind::softmax_classifier);
    TransformBank bank;
    bank.kind = kind;
    bank.transforms[0] = random_transform(rng, net, kind);
    bank.transforms[1] = random_transform(rng, net, kind);
    bank.transforms[2] = random_transform(rng, net, kind);
    CHECK(fd_check(net, bank, X, routes, labels, nullptr) <= 1e-5);
  }
}

TEST_CASE("backward matches finite differences on random geometries") {
  // Random depth (up to 3 hidden layers), width (up to 16) and batch (up to
  // 8), random reparametrisation, mixed-cluster routes.
  for (std::uint64_t seed : {540, 541, 542, 544, 546, 553, 554, 556}) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nh(1, 3), wid(2, 16), bat(2, 8), cls(2, 5);
    const int hidden = nh(rng), classes = cls(rng), batch = bat(rng), in = wid(rng);
    std::vector<int> dims{in};
    for (int l = 0; l < hidden; ++l) dims.push_back(wid(rng));
    dims.push_back(classes);
    const ReparamKind kind = static_cast<ReparamKind>(rng() % 4);
    NetworkParams net = random_network(rng, dims, OutputKind::softmax_classifier);
    TransformBank bank;
    bank.kind = kind;
    for (int c : {0, 1, 2}) bank.transforms[c] = random_transform(rng, net, kind);
    Matrix X = random_matrix(rng, batch, in, -1.5, 1.5);
    std::vector<int> routes, labels;
    for (int t = 0; t < batch; ++t) {
      routes.push_back(t % 3);
      labels.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(classes)));
    }
    CHECK(fd_check(net, bank, X, routes, labels, nullptr) <= 1e-5);
  }
}

TEST_CASE("backward matches finite differences for the regression head") {
  std::mt19937_64 rng(31);
  Matrix X = random_matrix(rng, 4, 3, -1.5, 1.5);
  Matrix targets = random_matrix(rng, 4, 2, -1.0, 1.0);
  std::vector<int> routes{1, 0, 1, 1};
  NetworkParams net = random_network(rng, {3, 6, 2}, OutputKind::linear_regressor);
  TransformBank bank;
  bank.kind = ReparamKind::exp;
  bank.transforms[0] = random_transform(rng, net, ReparamKind::exp);
  bank.transforms[1] = random_transform(rng, net, ReparamKind::exp);
  CHECK(fd_check(net, bank, X, routes, {}, &targets) <= 1e-5);
}

TEST_CASE("backward: clusters routed to no frame get exact zero gradients") {
  std::mt19937_64 rng(32);
  NetworkParams net = random_network(rng, {3, 5, 2}, OutputKind::softmax_classifier);
  TransformBank bank = init_bank(net, ReparamKind::exp, std::vector<int>{1, 2, 3});
  Matrix X = random_matrix(rng, 4, 3);
  std::vector<int> routes(4, 2);
  ForwardTrace tr = forward(net, bank, routes, X);
  LossGrad lg = softmax_xent(tr.output, std::vector<int>{0, 1, 1, 0});
  Gradients g = backward(tr, net, &bank, lg.grad);
  // Every bank cluster appears in the gradient map.
  CHECK(g.amp.size() == bank.transforms.size());
  for (int cid : {0, 1, 3}) {
    for (const Vector& layer : g.amp.at(cid)) {
      for (double v : layer) CHECK(v == 0.0);
    }
  }
  // The routed cluster actually received gradient mass.
  double mass = 0.0;
  for (const Vector& layer : g.amp.at(2))
    for (double v : layer) mass += std::abs(v);
  CHECK(mass > 0.0);
}

TEST_CASE("backward: mixed-cluster batch gradients add up over sub-batches") {
  std::mt19937_64 rng(33);
  NetworkParams net = random_network(rng, {4, 6, 5, 3}, OutputKind::softmax_classifier);
  TransformBank bank;
  bank.kind = ReparamKind::exp;
  bank.transforms[0] = init_transform(net, ReparamKind::exp);
  bank.transforms[1] = random_transform(rng, net, ReparamKind::exp);
  bank.transforms[2] = random_transform(rng, net, ReparamKind::exp);
  Matrix X = random_matrix(rng, 8, 4);
  std::vector<int> routes{1, 2, 1, 2, 1, 2, 1, 2};
  std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1};

  ForwardTrace tr = forward(net, bank, routes, X);
  LossGrad lg = softmax_xent(tr.output, labels);
  Gradients g_mixed = backward(tr, net, &bank, lg.grad);

  // Split by cluster, keeping frame order, and reuse the same upstream
  // loss gradient rows so the comparison is purely about backward().
  auto run_sub = [&](int cid) {
    std::vector<int> idx;
    for (int t = 0; t < 8; ++t)
      if (routes[static_cast<std::size_t>(t)] == cid) idx.push_back(t);
    Matrix Xs(static_cast<int>(idx.size()), X.cols);
    Matrix lgs(static_cast<int>(idx.size()), lg.grad.cols);
    std::vector<int> rs(idx.size(), cid);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (int c = 0; c < X.cols; ++c) Xs(static_cast<int>(r), c) = X(idx[r], c);
      for (int c = 0; c < lg.grad.cols; ++c)
        lgs(static_cast<int>(r), c) = lg.grad(idx[r], c);
    }
    ForwardTrace sub = forward(net, bank, rs, Xs);
    return backward(sub, net, &bank, lgs);
  };
  Gradients g1 = run_sub(1);
  Gradients g2 = run_sub(2);

  // Amplitude gradients: each cluster's gradient comes entirely from its own
  // sub-batch, accumulated in the same frame order.
  for (int cid : {1, 2}) {
    const Gradients& sub = cid == 1 ? g1 : g2;
    for (std::size_t l = 0; l < g_mixed.amp.at(cid).size(); ++l) {
      CHECK(max_abs_diff(g_mixed.amp.at(cid)[l], sub.amp.at(cid)[l]) <= 1e-12);
    }
  }
  // Shared-parameter gradients add across the two sub-batches.
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    for (std::size_t i = 0; i < g_mixed.theta[k].W.data.size(); ++i) {
      const double sum = g1.theta[k].W.data[i] + g2.theta[k].W.data[i];
      CHECK(std::abs(g_mixed.theta[k].W.data[i] - sum) <= 1e-12);
    }
    for (std::size_t i = 0; i < g_mixed.theta[k].b.size(); ++i) {
      const double sum = g1.theta[k].b[i] + g2.theta[k].b[i];
      CHECK(std::abs(g_mixed.theta[k].b[i] - sum) <= 1e-12);
    }
  }
}

TEST_CASE("backward: trace from a different topology is rejected") {
  std::mt19937_64 rng(34);
  NetworkParams a = random_network(rng, {3, 4, 2}, OutputKind::softmax_classifier);
  NetworkParams b = random_network(rng, {3, 5, 2}, OutputKind::softmax_classifier);
  Matrix X = random_matrix(rng, 2, 3);
  ForwardTrace tr = forward(a, X);
  LossGrad lg = softmax_xent(tr.output, std::vector<int>{0, 1});
  CHECK_THROWS_AS(backward(tr, b, nullptr, lg.grad), Error);
}

TEST_CASE("init_bank always contains the reserved cluster and rejects negatives") {
  std::mt19937_64 rng(35);
  NetworkParams net = random_network(rng, {3, 4, 2}, OutputKind::softmax_classifier);
  TransformBank bank = init_bank(net, ReparamKind::exp, std::vector<int>{5, 9});
  CHECK(bank.transforms.count(0) == 1);
  CHECK(bank.transforms.count(5) == 1);
  CHECK(bank.transforms.count(9) == 1);
  CHECK(bank.transforms.size() == 3);
  CHECK_THROWS_AS(init_bank(net, ReparamKind::exp, std::vector<int>{-1}), Error);
}

TEST_CASE("count_parameters: per-cluster count is the total hidden unit count") {
  // Two hidden layers of 8 units.
  NetworkParams net = init_network({4, 8, 8, 3}, OutputKind::softmax_classifier, 1);
  TransformBank bank = init_bank(net, ReparamKind::exp, std::vector<int>{1});
  ParamCount pc = count_parameters(net, &bank);
  CHECK(pc.per_cluster == 16);
  CHECK(pc.si == (8 * 4 + 8) + (8 * 8 + 8) + (3 * 8 + 3));
  // No bank: no per-cluster parameters.
  ParamCount bare = count_parameters(net, nullptr);
  CHECK(bare.per_cluster == 0);
  CHECK(bare.si == pc.si);

  // Six hidden layers of 2048 units: 12288 amplitudes per cluster.
  NetworkParams big;
  big.output_kind = OutputKind::softmax_classifier;
  std::vector<int> dims{16, 2048, 2048, 2048, 2048, 2048, 2048, 10};
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    Layer l;
    l.W = Matrix(dims[k + 1], dims[k]);
    l.b = Vector(static_cast<std::size_t>(dims[k + 1]), 0.0);
    big.layers.push_back(std::move(l));
  }
  TransformBank big_bank = init_bank(big, ReparamKind::exp, std::vector<int>{1});
  CHECK(count_parameters(big, &big_bank).per_cluster == 12288);
}
