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

#include "dgparse/sentence.h"

#include <cctype>
#include <stdexcept>

namespace dgparse {

std::string pos_letter(const std::string& tag) {
  if (tag.empty()) return "x";
  auto starts = [&tag](const char* p) { return tag.rfind(p, 0) == 0; };
  if (starts("VB")) return "v";
  if (starts("NN")) return "n";
  if (starts("JJ")) return "a";
  if (starts("RB")) return "adv";
  if (starts("IN")) return "prep";
  std::string out(1, static_cast<char>(std::tolower(static_cast<unsigned char>(tag[0]))));
  return out;
}

std::string target_lemma_key(const SentenceInstance& inst) {
  if (!inst.lemma_key.empty()) return inst.lemma_key;
  std::string lemma;
  for (int i = inst.target.start; i <= inst.target.end; ++i) {
    if (i < 0 || i >= static_cast<int>(inst.lemmas.size())) break;
    if (!lemma.empty()) lemma += ' ';
    lemma += inst.lemmas[static_cast<std::size_t>(i)];
  }
  const int last = inst.target.end;
  const std::string tag = (last >= 0 && last < static_cast<int>(inst.pos_tags.size()))
                              ? inst.pos_tags[static_cast<std::size_t>(last)]
                              : std::string();
  return lemma + "." + pos_letter(tag);
}

Vocabulary::Vocabulary() { add("<unk>"); }

int Vocabulary::add(const std::string& item) {
  auto it = index_.find(item);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(items_.size());
  items_.push_back(item);
  index_.emplace(item, id);
  return id;
}

int Vocabulary::id(const std::string& item) const {
  auto it = index_.find(item);
  return it == index_.end() ? 0 : it->second;
}

void Vocabularies::add(const SentenceInstance& inst) {
  for (const auto& w : inst.tokens) words.add(w);
  for (const auto& l : inst.lemmas) lemmas.add(l);
  for (const auto& p : inst.pos_tags) pos.add(p);
}

Var embed_tokens(Tape& tape, const SentenceInstance& inst,
                 const TokenEmbedder& emb, const Vocabularies& vocab) {
  const int n = inst.length();
  if (n < 1) throw std::invalid_argument("embed_tokens: empty sentence");
  std::vector<int> w(static_cast<std::size_t>(n)), l(w.size()), p(w.size()),
      t(w.size());
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    w[k] = vocab.words.id(inst.tokens[k]);
    l[k] = vocab.lemmas.id(inst.lemmas[k]);
    p[k] = vocab.pos.id(inst.pos_tags[k]);
    t[k] = inst.target.contains(i) ? 1 : 0;
  }
  const Var parts[] = {tape.lookup(*emb.words, w), tape.lookup(*emb.lemmas, l),
                       tape.lookup(*emb.pos, p),
                       tape.lookup(*emb.indicator, t)};
  return ad::hcat<Real>(parts);
}

std::string tree_violation(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return "empty dependency tree";
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int h = heads[static_cast<std::size_t>(i)];
    if (h == -1) {
      ++roots;
    } else if (h < 0 || h >= n) {
      return "head of token " + std::to_string(i) + " out of range";
    } else if (h == i) {
      return "token " + std::to_string(i) + " heads itself; not a tree";
    }
  }
  if (roots != 1) {
    return "expected exactly one root, found " + std::to_string(roots);
  }
  // Every token must reach the root without revisiting a token.
  for (int i = 0; i < n; ++i) {
    int cur = i;
    int steps = 0;
    while (heads[static_cast<std::size_t>(cur)] != -1) {
      cur = heads[static_cast<std::size_t>(cur)];
      if (++steps > n) return "dependency cycle through token " + std::to_string(i) + "; not a tree";
    }
  }
  return {};
}

UndirectedGraph dependency_graph(const std::vector<int>& heads) {
  if (auto why = tree_violation(heads); !why.empty()) {
    throw std::invalid_argument("malformed dependency tree: " + why);
  }
  UndirectedGraph g;
  g.node_count = static_cast<int>(heads.size());
  for (int i = 0; i < g.node_count; ++i) {
    const int h = heads[static_cast<std::size_t>(i)];
    if (h >= 0) g.edges.emplace_back(h, i);
  }
  return g;
}

Var encode_sentence(const Var& embeddings, const std::vector<int>& heads,
                    const SentenceEncoder& enc) {
  if (static_cast<std::size_t>(embeddings.rows()) != heads.size()) {
    throw std::invalid_argument("encode_sentence: heads/embeddings length mismatch");
  }
  auto adjacency = normalized_adjacency<Real>(dependency_graph(heads));
  Var alpha = encode_sequence(embeddings, enc.sequence);
  if (enc.dependency_gcn.empty()) return alpha;
  Var beta = alpha;
  for (const auto& layer : enc.dependency_gcn) {
    beta = gcn_layer(beta, adjacency, layer);
  }
  return alpha + beta;
}

Var span_representation(const Var& h, int i, int j,
                        const FeedForward<Real>& ffn) {
  if (i < 0 || j < i || j >= h.rows()) {
    throw std::out_of_range("span (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") invalid for length " +
                            std::to_string(h.rows()));
  }
  Var hi = ad::row(h, i);
  Var hj = ad::row(h, j);
  return feed_forward(ad::hcat(hj - hi, hj + hi), ffn);
}

}  // namespace dgparse
