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

// Frame identification, pointer-based argument boundaries, role
// classification, and the incremental frame-semantic-graph decoder.

#ifndef DGPARSE_DECODER_H_
#define DGPARSE_DECODER_H_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dgparse/model.h"

namespace dgparse {

// A categorical distribution over `support` items. log_probs is a 1 x |support|
// node; masked items hold -infinity (probability exactly 0).
struct Distribution {
  Var log_probs;
  std::vector<int> support;

  int size() const { return static_cast<int>(support.size()); }
  double prob(int position) const;
  // Position of the most probable item; ties resolve to the lowest position.
  int argmax() const;
  int best() const { return support[static_cast<std::size_t>(argmax())]; }
  int position_of(int item) const;
  // Probabilities scattered onto [0, n); items outside the support are 0.
  std::vector<double> dense(int n) const;
};

// Softmax over Y[candidates] . tanh(FFN(target_repr)).
Distribution identify_frame(const Var& target_repr, const Var& node_reprs,
                            const FeedForward<Real>& ffn,
                            std::span<const int> candidates);

// Linear frame classifier used when frame identification ignores the FKG.
Distribution identify_frame_linear(const Var& target_repr,
                                   const FeedForward<Real>& classifier,
                                   std::span<const int> candidates);

struct FsgArgument {
  Span span;
  int role = -1;  // FKG node index
};

// Star graph: node 0 is (target, frame), nodes 1..tau are arguments in
// insertion order.
struct PartialFsg {
  Span target;
  int frame = -1;
  std::vector<FsgArgument> arguments;

  int step() const { return static_cast<int>(arguments.size()); }
  int node_count() const { return step() + 1; }
  UndirectedGraph graph() const;
};

// g = maxpool(GCN([pi ; y] rows, star graph)).
Var encode_fsg(const Var& target_repr, std::span<const Var> argument_reprs,
               const Var& node_reprs, const PartialFsg& fsg,
               const FsgEncoder& enc);

// Final LSTM state over [target feature, argument features...].
Var lstm_decoder_step(const Var& target_feature, std::span<const Var> history,
                      const Lstm<Real>& cell);

// Pointer scores H . FFN(g) as a 1 x n row.
Var boundary_logits(const Var& graph_repr, const Var& tokens,
                    const FeedForward<Real>& ffn);

// Softmax over H . FFN(g) restricted to allowed positions.
Distribution point_boundary(const Var& graph_repr, const Var& tokens,
                            const FeedForward<Real>& ffn,
                            const std::vector<bool>& allowed);

// Softmax over Y[candidates] . FFN([span ; g]); the last row of node_reprs is
// the dummy node and must be a candidate.
Distribution classify_role(const Var& graph_repr, const Var& span_repr,
                           const Var& node_reprs, const FeedForward<Real>& ffn,
                           std::span<const int> candidates);

// Start positions: every token not already inside a selected argument.
std::vector<bool> start_positions(const std::vector<bool>& selected);
// End positions: j >= start with no selected token in [start, j].
std::vector<bool> end_positions(const std::vector<bool>& selected, int start);

// Encoded sentence with memoized span representations.
class SentenceContext {
 public:
  SentenceContext(const Model& model, Tape& tape, const SentenceInstance& inst);

  const Var& tokens() const { return tokens_; }
  int length() const { return static_cast<int>(tokens_.rows()); }
  Var span(const Span& s);

 private:
  const Model* model_;
  Var tokens_;
  std::map<Span, Var> spans_;
};

// g_tau through the FSG encoder, or the LSTM history encoder when the model
// runs without the FSG decoder.
Var graph_state(const Model& model, SentenceContext& ctx, const Var& node_reprs,
                const PartialFsg& fsg);

// Frame distribution for the target under lexicon filtering.
Distribution frame_distribution(const Model& model, SentenceContext& ctx,
                                const Var& node_reprs,
                                const SentenceInstance& inst,
                                std::span<const int> candidates);

struct ParsedArgument {
  Span span;
  int role = -1;
  double start_prob = 0;
  double end_prob = 0;
  double role_prob = 0;
};

struct ParseResult {
  int frame = -1;
  double frame_prob = 0;
  std::vector<ParsedArgument> arguments;
};

// Records every distribution produced while decoding, densified over its
// natural range, with the allowed set used to mask it.
struct DecodeTrace {
  struct Entry {
    std::vector<double> probs;
    std::vector<bool> allowed;
  };
  struct Step {
    int tau = 0;
    int graph_nodes = 0;
    int target_degree = 0;
  };
  std::vector<Entry> entries;
  std::vector<Step> steps;
};

ParseResult decode_structure(const Model& model, const SentenceInstance& inst,
                             std::optional<int> frame_override = std::nullopt,
                             DecodeTrace* trace = nullptr);

}  // namespace dgparse

#endif  // DGPARSE_DECODER_H_
