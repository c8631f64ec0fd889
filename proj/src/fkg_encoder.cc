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

#include "dgparse/fkg_encoder.h"

#include <random>

namespace dgparse {

NodeEmbeddingTable init_node_embeddings(Params& store,
                                        const FrameKnowledgeGraph& fkg,
                                        int dim, std::uint64_t seed,
                                        bool name_sharing) {
  if (dim < 1) throw std::invalid_argument("node embedding dimension must be >= 1");
  NodeEmbeddingTable table;
  table.row_of_node.assign(static_cast<std::size_t>(fkg.node_count), -1);
  int rows = 0;
  for (int f = 0; f < fkg.frame_count; ++f) {
    table.row_of_node[static_cast<std::size_t>(f)] = rows++;
  }
  if (name_sharing) {
    for (const auto& group : fkg.name_groups) {
      for (int node : group) table.row_of_node[static_cast<std::size_t>(node)] = rows;
      ++rows;
    }
  } else {
    for (int i = fkg.frame_count; i < fkg.frame_count + fkg.fe_count; ++i) {
      table.row_of_node[static_cast<std::size_t>(i)] = rows++;
    }
  }
  table.row_of_node[static_cast<std::size_t>(fkg.dummy_index)] = rows++;

  table.base = &store.add("fkg.base", rows, dim);
  std::mt19937_64 rng(seed);
  Params::init_uniform(*table.base, 0.1, rng);
  return table;
}

KnowledgeEncoder make_knowledge_encoder(
    Params& store, const FrameKnowledgeGraph& fkg, int dim, int layers,
    std::uint64_t seed, bool name_sharing, bool use_rgcn,
    const std::array<bool, kFkgRelationCount>& enabled_relations) {
  KnowledgeEncoder enc;
  enc.table = init_node_embeddings(store, fkg, dim, seed, name_sharing);
  if (!use_rgcn) return enc;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int l = 0; l < layers; ++l) {
    enc.layers.push_back(make_rel_graph_conv(store, "fkg.rgcn" + std::to_string(l),
                                             dim, dim, kFkgRelationCount,
                                             Activation::kTanh, rng));
  }
  enc.relation_ops =
      relation_adjacency<Real>(fkg.relational_graph(enabled_relations));
  return enc;
}

Var encode_fkg(Tape& tape, const KnowledgeEncoder& enc) {
  Var y = tape.lookup(*enc.table.base, enc.table.row_of_node);
  for (const auto& layer : enc.layers) y = rgcn_layer(y, enc.relation_ops, layer);
  return y;
}

}  // namespace dgparse
