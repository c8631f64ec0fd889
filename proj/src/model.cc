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

#include "dgparse/model.h"

#include <random>

namespace dgparse {

Model::Model(const ModelConfig& config,
             std::shared_ptr<const FrameOntology> ontology, Vocabularies vocab,
             std::uint64_t seed)
    : config_(config),
      ontology_(std::move(ontology)),
      fkg_(build_fkg(*ontology_)),
      vocab_(std::move(vocab)) {
  const int dh = config_.hidden_dim;
  const int dn = config_.node_dim;
  const int dg = graph_dim();
  std::mt19937_64 rng(seed);

  embedder.words = &params_.add("emb.word", vocab_.words.size(), config_.word_dim);
  embedder.lemmas = &params_.add("emb.lemma", vocab_.lemmas.size(), config_.lemma_dim);
  embedder.pos = &params_.add("emb.pos", vocab_.pos.size(), config_.pos_dim);
  embedder.indicator = &params_.add("emb.target", 2, config_.indicator_dim);
  for (Param* p : {embedder.words, embedder.lemmas, embedder.pos, embedder.indicator}) {
    Params::init_uniform(*p, 0.1, rng);
  }

  sentence.sequence = make_bi_sequence_encoder(
      params_, "bilstm", embedder.output_dim(), dh, config_.lstm_layers, rng);
  for (int l = 0; l < config_.gcn_layers; ++l) {
    sentence.dependency_gcn.push_back(make_graph_conv(
        params_, "depgcn" + std::to_string(l), dh, dh, Activation::kRelu, rng));
  }
  span_ffn = make_feed_forward(params_, "span", 2 * dh, dn, dn,
                               config_.ffn_layers, rng);

  knowledge = make_knowledge_encoder(params_, fkg_, dn, config_.fkg_layers,
                                     rng(), config_.name_sharing, config_.use_fkg,
                                     config_.enabled_relations);

  if (config_.fi_use_fkg) {
    frame_ffn = make_feed_forward(params_, "frame", dn, dn, dn,
                                  config_.ffn_layers, rng);
  } else {
    frame_classifier = make_feed_forward(params_, "frame_linear", dn, dn,
                                         fkg_.frame_count, 1, rng);
  }

  if (config_.use_fsg_decoder) {
    int in = 2 * dn;
    for (int l = 0; l < config_.gcn_layers; ++l) {
      fsg.layers.push_back(make_graph_conv(params_, "fsg" + std::to_string(l),
                                           in, dg, Activation::kRelu, rng));
      in = dg;
    }
  } else {
    history = make_lstm(params_, "history", 2 * dn, dg, rng);
  }

  start_ffn = make_feed_forward(params_, "start", dg, dh, dh, config_.ffn_layers, rng);
  end_ffn = make_feed_forward(params_, "end", dg, dh, dh, config_.ffn_layers, rng);
  role_ffn = make_feed_forward(params_, "role", dn + dg, dn, dn,
                               config_.ffn_layers, rng);
}

Var Model::node_representations(Tape& tape) const {
  if (cache_) return tape.constant(*cache_);
  return encode_fkg(tape, knowledge);
}

void Model::cache_node_representations() {
  cache_.reset();
  Tape tape;
  cache_ = encode_fkg(tape, knowledge).value();
}

std::map<std::string, Mat> Model::snapshot() const {
  std::map<std::string, Mat> out;
  for (const Param* p : params_.all()) out.emplace(p->name, p->value);
  return out;
}

void Model::restore(const std::map<std::string, Mat>& values) {
  for (Param* p : params_.all()) {
    auto it = values.find(p->name);
    if (it == values.end()) {
      throw std::invalid_argument("missing parameter " + p->name);
    }
    if (it->second.rows() != p->value.rows() ||
        it->second.cols() != p->value.cols()) {
      throw std::invalid_argument("shape mismatch for parameter " + p->name);
    }
    p->value = it->second;
  }
  cache_.reset();
}

}  // namespace dgparse
