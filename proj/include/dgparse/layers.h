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

// Differentiable building blocks: graph convolution, relational graph
// convolution, feed-forward stacks and (bi)directional LSTM encoders.

#ifndef DGPARSE_LAYERS_H_
#define DGPARSE_LAYERS_H_

#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgparse/autodiff.h"

namespace dgparse {

enum class Activation { kIdentity, kRelu, kTanh, kSigmoid };

template <typename Scalar>
ad::Var<Scalar> activate(const ad::Var<Scalar>& x, Activation act) {
  switch (act) {
    case Activation::kRelu: return ad::relu(x);
    case Activation::kTanh: return ad::tanh(x);
    case Activation::kSigmoid: return ad::sigmoid(x);
    case Activation::kIdentity: break;
  }
  return x;
}

// Owns every trainable matrix of a model. Parameters have stable addresses.
template <typename Scalar>
class ParameterStore {
 public:
  using Param = ad::Parameter<Scalar>;

  Param& add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    for (const auto& p : params_) {
      if (p->name == name) {
        throw std::invalid_argument("duplicate parameter name: " + name);
      }
    }
    auto p = std::make_unique<Param>();
    p->name = std::move(name);
    p->value = ad::Matrix<Scalar>::Zero(rows, cols);
    params_.push_back(std::move(p));
    return *params_.back();
  }

  // Uniform(-range, range) fill.
  template <typename Rng>
  static void init_uniform(Param& p, Scalar range, Rng& rng) {
    std::uniform_real_distribution<double> dist(-static_cast<double>(range),
                                                static_cast<double>(range));
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      p.value.data()[i] = static_cast<Scalar>(dist(rng));
    }
  }

  template <typename Rng>
  static void init_xavier(Param& p, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows() +
                                                             p.value.cols()));
    init_uniform(p, static_cast<Scalar>(limit), rng);
  }

  Param* find(const std::string& name) {
    for (auto& p : params_) {
      if (p->name == name) return p.get();
    }
    return nullptr;
  }

  std::vector<Param*> all() const {
    std::vector<Param*> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.push_back(p.get());
    return out;
  }

  std::size_t size() const { return params_.size(); }

  Eigen::Index scalar_count() const {
    Eigen::Index n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) p->zero_grad();
  }

 private:
  std::vector<std::unique_ptr<Param>> params_;
};

// Simple undirected graph as an edge list; each pair is one undirected edge.
struct UndirectedGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
};

// Undirected multi-relational graph: one edge list per relation kind.
struct RelationalGraph {
  int node_count = 0;
  std::vector<std::vector<std::pair<int, int>>> relations;
};

namespace detail {

inline std::vector<std::set<int>> neighbor_sets(
    int node_count, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::set<int>> nbrs(static_cast<std::size_t>(node_count));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw std::out_of_range("edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ") outside graph of " +
                              std::to_string(node_count) + " nodes");
    }
    if (a == b) {
      throw std::invalid_argument("self edge on node " + std::to_string(a) +
                                  "; graphs must be simple");
    }
    nbrs[static_cast<std::size_t>(a)].insert(b);
    nbrs[static_cast<std::size_t>(b)].insert(a);
  }
  return nbrs;
}

}  // namespace detail

// D^-1/2 (A + I) D^-1/2 with degrees taken over A + I.
template <typename Scalar>
std::shared_ptr<const ad::SparseMatrix<Scalar>> normalized_adjacency(
    const UndirectedGraph& g) {
  auto nbrs = detail::neighbor_sets(g.node_count, g.edges);
  for (int i = 0; i < g.node_count; ++i) nbrs[static_cast<std::size_t>(i)].insert(i);
  std::vector<Eigen::Triplet<Scalar>> trips;
  for (int i = 0; i < g.node_count; ++i) {
    const auto& ni = nbrs[static_cast<std::size_t>(i)];
    for (int j : ni) {
      const Scalar c = std::sqrt(static_cast<Scalar>(ni.size())) *
                       std::sqrt(static_cast<Scalar>(
                           nbrs[static_cast<std::size_t>(j)].size()));
      trips.emplace_back(i, j, Scalar(1) / c);
    }
  }
  auto m = std::make_shared<ad::SparseMatrix<Scalar>>(g.node_count, g.node_count);
  m->setFromTriplets(trips.begin(), trips.end());
  return m;
}

// Mean-aggregation operator per relation: row i averages over N_i^r.
template <typename Scalar>
std::vector<std::shared_ptr<const ad::SparseMatrix<Scalar>>>
relation_adjacency(const RelationalGraph& g) {
  std::vector<std::shared_ptr<const ad::SparseMatrix<Scalar>>> out;
  for (const auto& edges : g.relations) {
    auto nbrs = detail::neighbor_sets(g.node_count, edges);
    std::vector<Eigen::Triplet<Scalar>> trips;
    for (int i = 0; i < g.node_count; ++i) {
      const auto& ni = nbrs[static_cast<std::size_t>(i)];
      for (int j : ni) {
        trips.emplace_back(i, j, Scalar(1) / static_cast<Scalar>(ni.size()));
      }
    }
    auto m =
        std::make_shared<ad::SparseMatrix<Scalar>>(g.node_count, g.node_count);
    m->setFromTriplets(trips.begin(), trips.end());
    out.push_back(std::move(m));
  }
  return out;
}

template <typename Scalar>
struct GraphConvLayer {
  ad::Parameter<Scalar>* weight = nullptr;  // d_in x d_out
  Activation activation = Activation::kRelu;

  Eigen::Index input_dim() const { return weight->value.rows(); }
  Eigen::Index output_dim() const { return weight->value.cols(); }
};

template <typename Scalar, typename Rng>
GraphConvLayer<Scalar> make_graph_conv(ParameterStore<Scalar>& store,
                                       const std::string& name,
                                       Eigen::Index d_in, Eigen::Index d_out,
                                       Activation act, Rng& rng) {
  GraphConvLayer<Scalar> layer;
  layer.weight = &store.add(name + ".W", d_in, d_out);
  ParameterStore<Scalar>::init_xavier(*layer.weight, rng);
  layer.activation = act;
  return layer;
}

template <typename Scalar>
ad::Var<Scalar> gcn_layer(
    const ad::Var<Scalar>& h,
    const std::shared_ptr<const ad::SparseMatrix<Scalar>>& adjacency,
    const GraphConvLayer<Scalar>& layer) {
  if (h.cols() != layer.input_dim()) {
    throw std::invalid_argument("gcn_layer: input has " +
                                std::to_string(h.cols()) + " columns, layer expects " +
                                std::to_string(layer.input_dim()));
  }
  if (adjacency->rows() != h.rows()) {
    throw std::invalid_argument("gcn_layer: graph/feature node count mismatch");
  }
  auto& t = *h.tape();
  auto hw = ad::matmul(h, t.parameter(*layer.weight));
  return activate(ad::spmm(adjacency, hw), layer.activation);
}

template <typename Scalar>
ad::Var<Scalar> gcn_layer(const ad::Var<Scalar>& h, const UndirectedGraph& g,
                          const GraphConvLayer<Scalar>& layer) {
  return gcn_layer(h, normalized_adjacency<Scalar>(g), layer);
}

template <typename Scalar>
struct RelGraphConvLayer {
  ad::Parameter<Scalar>* self_weight = nullptr;
  std::vector<ad::Parameter<Scalar>*> relation_weights;
  Activation activation = Activation::kTanh;

  Eigen::Index input_dim() const { return self_weight->value.rows(); }
  Eigen::Index output_dim() const { return self_weight->value.cols(); }
};

template <typename Scalar, typename Rng>
RelGraphConvLayer<Scalar> make_rel_graph_conv(ParameterStore<Scalar>& store,
                                              const std::string& name,
                                              Eigen::Index d_in,
                                              Eigen::Index d_out,
                                              int relation_count,
                                              Activation act, Rng& rng) {
  if (relation_count < 1) {
    throw std::invalid_argument("relational layer needs at least one relation");
  }
  RelGraphConvLayer<Scalar> layer;
  layer.self_weight = &store.add(name + ".W0", d_in, d_out);
  ParameterStore<Scalar>::init_xavier(*layer.self_weight, rng);
  for (int r = 0; r < relation_count; ++r) {
    auto& w = store.add(name + ".W" + std::to_string(r + 1), d_in, d_out);
    ParameterStore<Scalar>::init_xavier(w, rng);
    layer.relation_weights.push_back(&w);
  }
  layer.activation = act;
  return layer;
}

// h_i' = act(h_i W0 + sum_r sum_{j in N_i^r} h_j W_r / |N_i^r|)
template <typename Scalar>
ad::Var<Scalar> rgcn_layer(
    const ad::Var<Scalar>& h,
    const std::vector<std::shared_ptr<const ad::SparseMatrix<Scalar>>>&
        relation_ops,
    const RelGraphConvLayer<Scalar>& layer) {
  if (relation_ops.size() > layer.relation_weights.size()) {
    throw std::invalid_argument(
        "rgcn_layer: " + std::to_string(relation_ops.size()) +
        " relation kinds supplied, layer declares " +
        std::to_string(layer.relation_weights.size()));
  }
  if (h.cols() != layer.input_dim()) {
    throw std::invalid_argument("rgcn_layer: input dimension mismatch");
  }
  auto& t = *h.tape();
  std::vector<ad::Var<Scalar>> terms;
  terms.push_back(ad::matmul(h, t.parameter(*layer.self_weight)));
  for (std::size_t r = 0; r < relation_ops.size(); ++r) {
    if (!relation_ops[r] || relation_ops[r]->nonZeros() == 0) continue;
    if (relation_ops[r]->rows() != h.rows()) {
      throw std::invalid_argument("rgcn_layer: relation node count mismatch");
    }
    auto hw = ad::matmul(h, t.parameter(*layer.relation_weights[r]));
    terms.push_back(ad::spmm(relation_ops[r], hw));
  }
  return activate(ad::sum<Scalar>(terms), layer.activation);
}

template <typename Scalar>
ad::Var<Scalar> rgcn_layer(const ad::Var<Scalar>& h, const RelationalGraph& g,
                           const RelGraphConvLayer<Scalar>& layer) {
  return rgcn_layer(h, relation_adjacency<Scalar>(g), layer);
}

// Affine layers with a hidden activation between them; the final layer is
// linear.
template <typename Scalar>
struct FeedForward {
  std::vector<ad::Parameter<Scalar>*> weights;  // d_in x d_out per layer
  std::vector<ad::Parameter<Scalar>*> biases;   // 1 x d_out per layer
  Activation hidden_activation = Activation::kRelu;

  Eigen::Index input_dim() const { return weights.front()->value.rows(); }
  Eigen::Index output_dim() const { return weights.back()->value.cols(); }
};

template <typename Scalar, typename Rng>
FeedForward<Scalar> make_feed_forward(ParameterStore<Scalar>& store,
                                      const std::string& name,
                                      Eigen::Index d_in, Eigen::Index d_hidden,
                                      Eigen::Index d_out, int layers,
                                      Rng& rng) {
  if (layers < 1) throw std::invalid_argument("feed-forward needs >= 1 layer");
  FeedForward<Scalar> ffn;
  Eigen::Index in = d_in;
  for (int l = 0; l < layers; ++l) {
    const Eigen::Index out = (l + 1 == layers) ? d_out : d_hidden;
    auto& w = store.add(name + ".W" + std::to_string(l), in, out);
    ParameterStore<Scalar>::init_xavier(w, rng);
    auto& b = store.add(name + ".b" + std::to_string(l), 1, out);
    ffn.weights.push_back(&w);
    ffn.biases.push_back(&b);
    in = out;
  }
  return ffn;
}

// Applies the stack row-wise, so x may hold several vectors.
template <typename Scalar>
ad::Var<Scalar> feed_forward(const ad::Var<Scalar>& x,
                             const FeedForward<Scalar>& ffn) {
  if (x.cols() != ffn.input_dim()) {
    throw std::invalid_argument("feed_forward: input has " +
                                std::to_string(x.cols()) + " columns, expects " +
                                std::to_string(ffn.input_dim()));
  }
  auto& t = *x.tape();
  ad::Var<Scalar> h = x;
  for (std::size_t l = 0; l < ffn.weights.size(); ++l) {
    h = ad::matmul(h, t.parameter(*ffn.weights[l])) +
        t.parameter(*ffn.biases[l]);
    if (l + 1 < ffn.weights.size()) h = activate(h, ffn.hidden_activation);
  }
  return h;
}

// Single-direction LSTM; gate order in the packed matrices is i, f, g, o.
template <typename Scalar>
struct Lstm {
  ad::Parameter<Scalar>* input_weight = nullptr;      // d_in x 4H
  ad::Parameter<Scalar>* recurrent_weight = nullptr;  // H x 4H
  ad::Parameter<Scalar>* bias = nullptr;              // 1 x 4H

  Eigen::Index input_dim() const { return input_weight->value.rows(); }
  Eigen::Index hidden_dim() const { return recurrent_weight->value.rows(); }
};

template <typename Scalar, typename Rng>
Lstm<Scalar> make_lstm(ParameterStore<Scalar>& store, const std::string& name,
                       Eigen::Index d_in, Eigen::Index hidden, Rng& rng) {
  Lstm<Scalar> cell;
  cell.input_weight = &store.add(name + ".Wx", d_in, 4 * hidden);
  cell.recurrent_weight = &store.add(name + ".Wh", hidden, 4 * hidden);
  cell.bias = &store.add(name + ".b", 1, 4 * hidden);
  ParameterStore<Scalar>::init_xavier(*cell.input_weight, rng);
  ParameterStore<Scalar>::init_xavier(*cell.recurrent_weight, rng);
  return cell;
}

// Runs the cell over the rows of x (in reverse order when `reverse`), and
// returns the hidden states aligned with the input positions.
template <typename Scalar>
ad::Var<Scalar> run_lstm(const ad::Var<Scalar>& x, const Lstm<Scalar>& cell,
                         bool reverse = false) {
  if (x.rows() < 1) throw std::invalid_argument("run_lstm: empty sequence");
  if (x.cols() != cell.input_dim()) {
    throw std::invalid_argument("run_lstm: input dimension mismatch");
  }
  auto& t = *x.tape();
  const Eigen::Index n = x.rows();
  const Eigen::Index hd = cell.hidden_dim();
  auto projected =
      ad::matmul(x, t.parameter(*cell.input_weight)) + t.parameter(*cell.bias);
  auto wh = t.parameter(*cell.recurrent_weight);
  ad::Var<Scalar> h = t.constant(ad::Matrix<Scalar>::Zero(1, hd));
  ad::Var<Scalar> c = h;
  std::vector<ad::Var<Scalar>> states(static_cast<std::size_t>(n));
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index pos = reverse ? n - 1 - step : step;
    auto gates = ad::row(projected, pos) + ad::matmul(h, wh);
    auto i = ad::sigmoid(ad::middle_cols(gates, 0, hd));
    auto f = ad::sigmoid(ad::middle_cols(gates, hd, hd));
    auto g = ad::tanh(ad::middle_cols(gates, 2 * hd, hd));
    auto o = ad::sigmoid(ad::middle_cols(gates, 3 * hd, hd));
    c = ad::hadamard(f, c) + ad::hadamard(i, g);
    h = ad::hadamard(o, ad::tanh(c));
    states[static_cast<std::size_t>(pos)] = h;
  }
  return ad::vcat<Scalar>(states);
}

// Final hidden state of a forward pass over the rows of x.
template <typename Scalar>
ad::Var<Scalar> lstm_final_state(const ad::Var<Scalar>& x,
                                 const Lstm<Scalar>& cell) {
  auto states = run_lstm(x, cell);
  return ad::row(states, states.rows() - 1);
}

// Stacked bidirectional LSTM. Each output row is [forward ; backward].
template <typename Scalar>
struct BiSequenceEncoder {
  std::vector<Lstm<Scalar>> forward;
  std::vector<Lstm<Scalar>> backward;

  Eigen::Index output_dim() const {
    return forward.back().hidden_dim() + backward.back().hidden_dim();
  }
};

template <typename Scalar, typename Rng>
BiSequenceEncoder<Scalar> make_bi_sequence_encoder(
    ParameterStore<Scalar>& store, const std::string& name, Eigen::Index d_in,
    Eigen::Index d_out, int layers, Rng& rng) {
  if (d_out % 2 != 0) {
    throw std::invalid_argument("bidirectional output dimension must be even");
  }
  if (layers < 1) throw std::invalid_argument("encoder needs >= 1 layer");
  BiSequenceEncoder<Scalar> enc;
  Eigen::Index in = d_in;
  for (int l = 0; l < layers; ++l) {
    const std::string prefix = name + ".l" + std::to_string(l);
    enc.forward.push_back(make_lstm(store, prefix + ".fwd", in, d_out / 2, rng));
    enc.backward.push_back(make_lstm(store, prefix + ".bwd", in, d_out / 2, rng));
    in = d_out;
  }
  return enc;
}

template <typename Scalar>
ad::Var<Scalar> encode_sequence(const ad::Var<Scalar>& x,
                                const BiSequenceEncoder<Scalar>& enc) {
  if (x.rows() < 1) throw std::invalid_argument("encode_sequence: empty sequence");
  ad::Var<Scalar> h = x;
  for (std::size_t l = 0; l < enc.forward.size(); ++l) {
    auto fwd = run_lstm(h, enc.forward[l], false);
    auto bwd = run_lstm(h, enc.backward[l], true);
    h = ad::hcat(fwd, bwd);
  }
  return h;
}

}  // namespace dgparse

#endif  // DGPARSE_LAYERS_H_
