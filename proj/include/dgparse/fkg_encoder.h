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

#ifndef DGPARSE_FKG_ENCODER_H_
#define DGPARSE_FKG_ENCODER_H_

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "dgparse/ontology.h"
#include "dgparse/sentence.h"

namespace dgparse {

// Base vectors for every FKG node. With name sharing, FEs carrying the same
// name map to one parameter row.
struct NodeEmbeddingTable {
  Param* base = nullptr;
  std::vector<int> row_of_node;  // size node_count

  int node_count() const { return static_cast<int>(row_of_node.size()); }
  Eigen::Index dim() const { return base->value.cols(); }
};

// Rows drawn from uniform(-0.1, 0.1) with the given seed.
NodeEmbeddingTable init_node_embeddings(Params& store,
                                        const FrameKnowledgeGraph& fkg,
                                        int dim, std::uint64_t seed,
                                        bool name_sharing = true);

struct KnowledgeEncoder {
  NodeEmbeddingTable table;
  std::vector<RelGraphConvLayer<Real>> layers;  // empty: plain table lookup
  std::vector<std::shared_ptr<const ad::SparseMatrix<Real>>> relation_ops;
};

KnowledgeEncoder make_knowledge_encoder(
    Params& store, const FrameKnowledgeGraph& fkg, int dim, int layers,
    std::uint64_t seed, bool name_sharing, bool use_rgcn,
    const std::array<bool, kFkgRelationCount>& enabled_relations);

// (node_count x dim) matrix whose row i represents FKG node i.
Var encode_fkg(Tape& tape, const KnowledgeEncoder& enc);

}  // namespace dgparse

#endif  // DGPARSE_FKG_ENCODER_H_
