// Copyright 2026 The dgparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include "doctest.h"
#include "dgparse/layers.h"
#include "oracles.h"

namespace {

using namespace dgparse;
using M = Eigen::MatrixXd;
using Store = ParameterStore<double>;
using T = ad::Tape<double>;
using V = ad::Var<double>;

double max_abs(const M& a, const M& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Relative finite-difference error over every parameter of `store` for the
// scalar produced by `f`; step 1e-4 as required for the primitives.
double param_grad_error(Store& store, const std::function<V(T&)>& f) {
  store.zero_grad();
  {
    T tape;
    tape.backward(f(tape));
  }
  double worst = 0;
  const double eps = 1e-4;
  for (auto* p : store.all()) {
    for (Eigen::Index k = 0; k < p->value.size(); ++k) {
      const double orig = p->value.data()[k];
      p->value.data()[k] = orig + eps;
      double up, down;
      {
        T t;
        up = f(t).scalar();
      }
      p->value.data()[k] = orig - eps;
      {
        T t;
        down = f(t).scalar();
      }
      p->value.data()[k] = orig;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = p->grad.data()[k];
      const double denom = std::max({1e-4, std::abs(numeric), std::abs(analytic)});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

V weighted_sum(T& tape, const V& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ad::sum_all(ad::hadamard(
      x, tape.constant(oracle::random_matrix(rng, static_cast<int>(x.rows()),
                                             static_cast<int>(x.cols())))));
}

}  // namespace

TEST_CASE("gcn_layer matches the node-level oracle on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 1, 8);
    const int din = oracle::uniform_int(rng, 1, 5), dout = oracle::uniform_int(rng, 1, 5);
    UndirectedGraph g{n, oracle::random_edges(rng, n, 0.4)};
    Store store;
    auto layer = make_graph_conv(store, "g", din, dout, Activation::kRelu, rng);
    M h = oracle::random_matrix(rng, n, din);
    T tape;
    V out = gcn_layer(tape.constant(h), g, layer);
    REQUIRE(max_abs(out.value(), oracle::gcn(h, g.edges, layer.weight->value, Activation::kRelu)) <= 1e-6);
  }
}

TEST_CASE("gcn_layer special cases") {
  std::mt19937_64 rng(12);
  Store store;
  auto layer = make_graph_conv(store, "g", 3, 3, Activation::kRelu, rng);
  M h = oracle::random_matrix(rng, 4, 3);
  UndirectedGraph g{4, {{0, 1}, {2, 3}}};
  layer.weight->value.setZero();
  {
    T tape;
    CHECK(gcn_layer(tape.constant(h), g, layer).value().isZero());
  }
  layer.weight->value.setIdentity();
  layer.activation = Activation::kIdentity;
  {
    T tape;
    M one = oracle::random_matrix(rng, 1, 3);
    CHECK(max_abs(gcn_layer(tape.constant(one), UndirectedGraph{1, {}}, layer).value(), one) == 0.0);
  }
  T tape;
  CHECK_THROWS_AS(gcn_layer(tape.constant(M::Zero(4, 2)), g, layer), std::invalid_argument);
  CHECK_THROWS_AS(gcn_layer(tape.constant(h), UndirectedGraph{4, {{1, 1}}}, layer), std::invalid_argument);
  CHECK_THROWS_AS(gcn_layer(tape.constant(h), UndirectedGraph{4, {{0, 7}}}, layer), std::out_of_range);
}

TEST_CASE("normalized adjacency is symmetric with self-loops") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = oracle::uniform_int(rng, 1, 8);
    auto a = normalized_adjacency<double>(UndirectedGraph{n, oracle::random_edges(rng, n, 0.5)});
    M d = M(*a);
    CHECK(max_abs(d, d.transpose()) == 0.0);
    for (int i = 0; i < n; ++i) CHECK(d(i, i) > 0);
  }
}

TEST_CASE("rgcn_layer matches the node-level oracle on random graphs") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::uniform_int(rng, 1, 8);
    const int rels = oracle::uniform_int(rng, 1, 4);
    const int din = oracle::uniform_int(rng, 1, 5), dout = oracle::uniform_int(rng, 1, 5);
    RelationalGraph g{n, {}};
    for (int r = 0; r < rels; ++r) g.relations.push_back(oracle::random_edges(rng, n, 0.35));
    Store store;
    auto layer = make_rel_graph_conv(store, "r", din, dout, rels, Activation::kTanh, rng);
    std::vector<M> wr;
    for (auto* w : layer.relation_weights) wr.push_back(w->value);
    M h = oracle::random_matrix(rng, n, din);
    T tape;
    V out = rgcn_layer(tape.constant(h), g, layer);
    REQUIRE(max_abs(out.value(), oracle::rgcn(h, g.relations, layer.self_weight->value, wr,
                                              Activation::kTanh)) <= 1e-6);
  }
}

TEST_CASE("rgcn_layer special cases") {
  std::mt19937_64 rng(15);
  Store store;
  auto layer = make_rel_graph_conv(store, "r", 3, 3, 2, Activation::kTanh, rng);
  M h = oracle::random_matrix(rng, 5, 3);
  RelationalGraph g{5, {{{0, 1}, {1, 2}}, {{2, 3}}}};
  for (auto* w : layer.relation_weights) w->value.setZero();
  layer.self_weight->value.setIdentity();
  {
    T tape;
    CHECK(max_abs(rgcn_layer(tape.constant(h), g, layer).value(), M(h.array().tanh())) <= 1e-15);
  }
  // Node 4 is isolated: with W0 = 0 its row is tanh(0) = 0 whatever the rest does.
  std::mt19937_64 rng2(16);
  auto layer2 = make_rel_graph_conv(store, "r2", 3, 3, 2, Activation::kTanh, rng2);
  layer2.self_weight->value.setZero();
  {
    T tape;
    CHECK(rgcn_layer(tape.constant(h), g, layer2).value().row(4).isZero());
  }
  // Edge order inside a relation does not matter.
  RelationalGraph shuffled{5, {{{2, 1}, {1, 0}}, {{3, 2}}}};
  {
    T tape;
    CHECK(max_abs(rgcn_layer(tape.constant(h), g, layer2).value(),
                  rgcn_layer(tape.constant(h), shuffled, layer2).value()) == 0.0);
  }
  RelationalGraph too_many{5, {{}, {}, {{0, 1}}}};
  T tape;
  CHECK_THROWS_AS(rgcn_layer(tape.constant(h), too_many, layer), std::invalid_argument);
  CHECK_THROWS_AS(rgcn_layer(tape.constant(M::Zero(5, 4)), g, layer), std::invalid_argument);
}

TEST_CASE("feed_forward matches the affine chain") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Store store;
    const int layers = oracle::uniform_int(rng, 1, 3);
    auto ffn = make_feed_forward(store, "f", 4, 6, 3, layers, rng);
    for (auto* b : ffn.biases) b->value = oracle::random_matrix(rng, 1, static_cast<int>(b->value.cols()));
    M x = oracle::random_matrix(rng, 2, 4);
    T tape;
    REQUIRE(max_abs(feed_forward(tape.constant(x), ffn).value(), oracle::ffn(x, ffn)) <= 1e-6);
  }
  Store store;
  auto one = make_feed_forward(store, "z", 3, 3, 3, 1, rng);
  one.weights[0]->value.setZero();
  T tape;
  CHECK(feed_forward(tape.constant(oracle::random_matrix(rng, 1, 3)), one).value().isZero());
  auto two = make_feed_forward(store, "id", 3, 3, 3, 2, rng);
  two.hidden_activation = Activation::kIdentity;
  for (auto* w : two.weights) w->value.setIdentity();
  M x = oracle::random_matrix(rng, 1, 3);
  CHECK(max_abs(feed_forward(tape.constant(x), two).value(), x) == 0.0);
  CHECK_THROWS_AS(feed_forward(tape.constant(M::Zero(1, 4)), two), std::invalid_argument);
}

TEST_CASE("lstm matches the unrolled recurrence") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    Store store;
    auto cell = make_lstm(store, "l", 3, 4, rng);
    cell.bias->value = oracle::random_matrix(rng, 1, 16);
    M x = oracle::random_matrix(rng, oracle::uniform_int(rng, 1, 6), 3);
    T tape;
    for (bool rev : {false, true}) {
      REQUIRE(max_abs(run_lstm(tape.constant(x), cell, rev).value(), oracle::lstm(x, cell, rev)) <= 1e-6);
    }
  }
}

TEST_CASE("bidirectional encoder") {
  std::mt19937_64 rng(19);
  Store store;
  auto enc = make_bi_sequence_encoder(store, "bi", 3, 8, 1, rng);
  M x = oracle::random_matrix(rng, 5, 3);
  T tape;
  M out = encode_sequence(tape.constant(x), enc).value();
  CHECK(out.rows() == 5);
  CHECK(out.cols() == 8);
  CHECK(max_abs(out, oracle::bilstm(x, enc)) <= 1e-6);
  // Reversal swaps the forward and backward halves when both directions share weights.
  enc.backward[0].input_weight->value = enc.forward[0].input_weight->value;
  enc.backward[0].recurrent_weight->value = enc.forward[0].recurrent_weight->value;
  enc.backward[0].bias->value = enc.forward[0].bias->value;
  // Parameter nodes are memoized per tape, so mutated weights need a new one.
  T fresh;
  M rev = x.colwise().reverse();
  M a = encode_sequence(fresh.constant(x), enc).value();
  M b = encode_sequence(fresh.constant(rev), enc).value();
  for (int i = 0; i < 5; ++i) {
    CHECK(max_abs(a.row(i).head(4), b.row(4 - i).tail(4)) <= 1e-12);
    CHECK(max_abs(a.row(i).tail(4), b.row(4 - i).head(4)) <= 1e-12);
  }
  CHECK(encode_sequence(fresh.constant(x.topRows(1)), enc).value().rows() == 1);
  CHECK(max_abs(encode_sequence(fresh.constant(x), enc).value(), a) == 0.0);
  CHECK_THROWS(encode_sequence(tape.constant(M::Zero(0, 3)), enc));
  auto deep = make_bi_sequence_encoder(store, "deep", 3, 6, 2, rng);
  CHECK(max_abs(encode_sequence(tape.constant(x), deep).value(), oracle::bilstm(x, deep)) <= 1e-6);
}

TEST_CASE("primitive gradients match finite differences") {
  std::mt19937_64 rng(20);
  M h = oracle::random_matrix(rng, 5, 3);
  UndirectedGraph g{5, {{0, 1}, {1, 2}, {3, 4}}};
  RelationalGraph rg{5, {{{0, 1}, {1, 2}}, {{2, 3}, {0, 4}}}};
  {
    Store s;
    auto layer = make_graph_conv(s, "g", 3, 4, Activation::kTanh, rng);
    CHECK(param_grad_error(s, [&](T& t) { return weighted_sum(t, gcn_layer(t.constant(h), g, layer), 1); }) <=
          1e-3);
  }
  {
    Store s;
    auto layer = make_rel_graph_conv(s, "r", 3, 4, 2, Activation::kTanh, rng);
    CHECK(param_grad_error(s, [&](T& t) { return weighted_sum(t, rgcn_layer(t.constant(h), rg, layer), 2); }) <=
          1e-3);
  }
  {
    Store s;
    auto ffn = make_feed_forward(s, "f", 3, 5, 2, 2, rng);
    for (auto* b : ffn.biases) b->value = oracle::random_matrix(rng, 1, static_cast<int>(b->value.cols()));
    CHECK(param_grad_error(s, [&](T& t) { return weighted_sum(t, feed_forward(t.constant(h), ffn), 3); }) <=
          1e-3);
  }
  {
    Store s;
    auto enc = make_bi_sequence_encoder(s, "bi", 3, 4, 2, rng);
    CHECK(param_grad_error(s, [&](T& t) { return weighted_sum(t, encode_sequence(t.constant(h), enc), 4); }) <=
          1e-3);
  }
}

TEST_CASE("parameter store rejects duplicates") {
  Store s;
  s.add("a", 1, 1);
  CHECK_THROWS_AS(s.add("a", 2, 2), std::invalid_argument);
  CHECK(s.size() == 1);
}
