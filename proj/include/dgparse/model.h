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

#ifndef DGPARSE_MODEL_H_
#define DGPARSE_MODEL_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>

#include "dgparse/fkg_encoder.h"
#include "dgparse/ontology.h"
#include "dgparse/sentence.h"

namespace dgparse {

struct ModelConfig {
  int word_dim = 100;
  int lemma_dim = 50;
  int pos_dim = 25;
  int indicator_dim = 25;
  int hidden_dim = 512;  // d_h
  int node_dim = 256;    // d_n
  int lstm_layers = 2;
  int gcn_layers = 2;
  int fkg_layers = 2;
  int ffn_layers = 2;

  // Ablation switches.
  bool use_fkg = true;
  bool use_fsg_decoder = true;
  bool name_sharing = true;
  bool fi_use_fkg = true;
  std::array<bool, kFkgRelationCount> enabled_relations = {true, true, true,
                                                           true};

  bool operator==(const ModelConfig&) const = default;
};

// Star-graph encoder over the partial frame semantic graph. The first layer
// projects the [span ; node] rows (2 * d_n) to the graph width.
struct FsgEncoder {
  std::vector<GraphConvLayer<Real>> layers;
};

class Model {
 public:
  Model(const ModelConfig& config, std::shared_ptr<const FrameOntology> ontology,
        Vocabularies vocab, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  const FrameOntology& ontology() const { return *ontology_; }
  std::shared_ptr<const FrameOntology> shared_ontology() const { return ontology_; }
  const FrameKnowledgeGraph& fkg() const { return fkg_; }
  const Vocabularies& vocab() const { return vocab_; }
  Params& params() { return params_; }
  const Params& params() const { return params_; }
  int graph_dim() const { return config_.node_dim; }

  // FKG node representations on `tape`: the cached matrix as a constant when
  // present, otherwise a fresh differentiable encoding.
  Var node_representations(Tape& tape) const;
  void cache_node_representations();
  void clear_cache() { cache_.reset(); }
  bool has_cache() const { return cache_.has_value(); }

  // Parameter values keyed by name.
  std::map<std::string, Mat> snapshot() const;
  void restore(const std::map<std::string, Mat>& values);

  TokenEmbedder embedder;
  SentenceEncoder sentence;
  FeedForward<Real> span_ffn;
  KnowledgeEncoder knowledge;
  FeedForward<Real> frame_ffn;         // fi_use_fkg
  FeedForward<Real> frame_classifier;  // !fi_use_fkg
  FsgEncoder fsg;                      // use_fsg_decoder
  Lstm<Real> history;                  // !use_fsg_decoder
  FeedForward<Real> start_ffn;
  FeedForward<Real> end_ffn;
  FeedForward<Real> role_ffn;

 private:
  ModelConfig config_;
  std::shared_ptr<const FrameOntology> ontology_;
  FrameKnowledgeGraph fkg_;
  Vocabularies vocab_;
  Params params_;
  std::optional<Mat> cache_;
};

}  // namespace dgparse

#endif  // DGPARSE_MODEL_H_
