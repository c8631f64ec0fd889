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

// Sentence instances and the contextual sentence encoder (token embeddings,
// BiLSTM, dependency GCN) with boundary-based span representations.

#ifndef DGPARSE_SENTENCE_H_
#define DGPARSE_SENTENCE_H_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dgparse/layers.h"

namespace dgparse {

using Real = double;
using Tape = ad::Tape<Real>;
using Var = ad::Var<Real>;
using Mat = ad::Matrix<Real>;
using Param = ad::Parameter<Real>;
using Params = ParameterStore<Real>;

// Inclusive token span.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int i) const { return i >= start && i <= end; }
  bool overlaps(const Span& o) const { return start <= o.end && o.start <= end; }
  auto operator<=>(const Span&) const = default;
};

struct GoldArgument {
  Span span;
  std::string role;

  bool operator==(const GoldArgument&) const = default;
};

struct SentenceInstance {
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
  std::vector<std::string> pos_tags;
  std::vector<int> dep_heads;  // -1 marks the root
  Span target;
  std::optional<std::string> frame;
  std::optional<std::vector<GoldArgument>> arguments;
  // Overrides the lemma key derived from the target tokens when non-empty.
  std::string lemma_key;

  int length() const { return static_cast<int>(tokens.size()); }
  bool operator==(const SentenceInstance&) const = default;
};

// "<lemma>.<pos-letter>", e.g. "receive.v"; multiword targets join lemmas with
// spaces and take the POS letter of the last token.
std::string target_lemma_key(const SentenceInstance& inst);

// Maps a Penn-style tag to a FrameNet POS letter.
std::string pos_letter(const std::string& tag);

// Index 0 is the reserved unknown entry.
class Vocabulary {
 public:
  Vocabulary();
  int add(const std::string& item);
  int id(const std::string& item) const;
  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
};

struct Vocabularies {
  Vocabulary words;
  Vocabulary lemmas;
  Vocabulary pos;

  void add(const SentenceInstance& inst);
};

struct TokenEmbedder {
  Param* words = nullptr;
  Param* lemmas = nullptr;
  Param* pos = nullptr;
  Param* indicator = nullptr;  // 2 rows: not-target, target

  Eigen::Index output_dim() const {
    return words->value.cols() + lemmas->value.cols() + pos->value.cols() +
           indicator->value.cols();
  }
};

// Row i = [word_i ; lemma_i ; pos_i ; is_target_i].
Var embed_tokens(Tape& tape, const SentenceInstance& inst,
                 const TokenEmbedder& emb, const Vocabularies& vocab);

// Undirected, unlabeled dependency graph; throws when heads are not a tree.
UndirectedGraph dependency_graph(const std::vector<int>& heads);

// Empty when heads encode a single-rooted tree; otherwise the reason.
std::string tree_violation(const std::vector<int>& heads);

struct SentenceEncoder {
  BiSequenceEncoder<Real> sequence;
  std::vector<GraphConvLayer<Real>> dependency_gcn;
};

// H = BiLSTM(E) + GCN(BiLSTM(E), tree).
Var encode_sentence(const Var& embeddings, const std::vector<int>& heads,
                    const SentenceEncoder& enc);

// Q(i, j) = FFN((h_j - h_i) ++ (h_j + h_i)).
Var span_representation(const Var& h, int i, int j,
                        const FeedForward<Real>& ffn);

}  // namespace dgparse

#endif  // DGPARSE_SENTENCE_H_
