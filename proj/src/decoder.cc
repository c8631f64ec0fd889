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

#include "dgparse/decoder.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgparse {

double Distribution::prob(int position) const {
  return std::exp(log_probs.value()(0, position));
}

int Distribution::argmax() const {
  const Mat& v = log_probs.value();
  int best = 0;
  for (int k = 1; k < v.cols(); ++k) {
    if (v(0, k) > v(0, best)) best = k;
  }
  return best;
}

int Distribution::position_of(int item) const {
  auto it = std::find(support.begin(), support.end(), item);
  return it == support.end() ? -1 : static_cast<int>(it - support.begin());
}

std::vector<double> Distribution::dense(int n) const {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < size(); ++k) {
    out[static_cast<std::size_t>(support[static_cast<std::size_t>(k)])] = prob(k);
  }
  return out;
}

namespace {

void check_candidates(std::span<const int> candidates, Eigen::Index limit,
                      const char* what) {
  if (candidates.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty candidate list");
  }
  for (int c : candidates) {
    if (c < 0 || c >= limit) {
      throw std::out_of_range(std::string(what) + ": candidate " +
                              std::to_string(c) + " out of range");
    }
  }
}

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

Distribution identify_frame(const Var& target_repr, const Var& node_reprs,
                            const FeedForward<Real>& ffn,
                            std::span<const int> candidates) {
  check_candidates(candidates, node_reprs.rows(), "identify_frame");
  Var gamma = ad::tanh(feed_forward(target_repr, ffn));
  Var logits = ad::matmul_nt(gamma, ad::rows(node_reprs, candidates));
  return {ad::log_softmax(logits), {candidates.begin(), candidates.end()}};
}

Distribution identify_frame_linear(const Var& target_repr,
                                   const FeedForward<Real>& classifier,
                                   std::span<const int> candidates) {
  const int frames = static_cast<int>(classifier.output_dim());
  check_candidates(candidates, frames, "identify_frame_linear");
  std::vector<bool> allowed(static_cast<std::size_t>(frames), false);
  for (int c : candidates) allowed[static_cast<std::size_t>(c)] = true;
  Var logits = feed_forward(target_repr, classifier);
  return {ad::masked_log_softmax(logits, allowed), iota(frames)};
}

UndirectedGraph PartialFsg::graph() const {
  UndirectedGraph g;
  g.node_count = node_count();
  for (int j = 1; j <= step(); ++j) g.edges.emplace_back(0, j);
  return g;
}

Var encode_fsg(const Var& target_repr, std::span<const Var> argument_reprs,
               const Var& node_reprs, const PartialFsg& fsg,
               const FsgEncoder& enc) {
  if (static_cast<int>(argument_reprs.size()) != fsg.step()) {
    throw std::invalid_argument("encode_fsg: one representation per argument node required");
  }
  std::vector<Var> rows;
  rows.reserve(static_cast<std::size_t>(fsg.node_count()));
  rows.push_back(ad::hcat(target_repr, ad::row(node_reprs, fsg.frame)));
  for (int j = 0; j < fsg.step(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    rows.push_back(ad::hcat(argument_reprs[k],
                            ad::row(node_reprs, fsg.arguments[k].role)));
  }
  Var z = ad::vcat<Real>(rows);
  auto adjacency = normalized_adjacency<Real>(fsg.graph());
  for (const auto& layer : enc.layers) z = gcn_layer(z, adjacency, layer);
  return ad::colwise_max(z);
}

Var lstm_decoder_step(const Var& target_feature, std::span<const Var> history,
                      const Lstm<Real>& cell) {
  std::vector<Var> seq;
  seq.reserve(history.size() + 1);
  seq.push_back(target_feature);
  seq.insert(seq.end(), history.begin(), history.end());
  return lstm_final_state(ad::vcat<Real>(seq), cell);
}

Var boundary_logits(const Var& graph_repr, const Var& tokens,
                    const FeedForward<Real>& ffn) {
  return ad::matmul_nt(feed_forward(graph_repr, ffn), tokens);
}

Distribution point_boundary(const Var& graph_repr, const Var& tokens,
                            const FeedForward<Real>& ffn,
                            const std::vector<bool>& allowed) {
  if (static_cast<Eigen::Index>(allowed.size()) != tokens.rows()) {
    throw std::invalid_argument("point_boundary: mask length != sentence length");
  }
  if (std::none_of(allowed.begin(), allowed.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("point_boundary: every position is masked");
  }
  return {ad::masked_log_softmax(boundary_logits(graph_repr, tokens, ffn), allowed),
          iota(static_cast<int>(tokens.rows()))};
}

Distribution classify_role(const Var& graph_repr, const Var& span_repr,
                           const Var& node_reprs, const FeedForward<Real>& ffn,
                           std::span<const int> candidates) {
  check_candidates(candidates, node_reprs.rows(), "classify_role");
  const int dummy = static_cast<int>(node_reprs.rows()) - 1;
  if (std::find(candidates.begin(), candidates.end(), dummy) == candidates.end()) {
    throw std::invalid_argument("classify_role: dummy node must be a candidate");
  }
  Var gamma = feed_forward(ad::hcat(span_repr, graph_repr), ffn);
  Var logits = ad::matmul_nt(gamma, ad::rows(node_reprs, candidates));
  return {ad::log_softmax(logits), {candidates.begin(), candidates.end()}};
}

std::vector<bool> start_positions(const std::vector<bool>& selected) {
  std::vector<bool> allowed(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) allowed[i] = !selected[i];
  return allowed;
}

std::vector<bool> end_positions(const std::vector<bool>& selected, int start) {
  std::vector<bool> allowed(selected.size(), false);
  for (std::size_t j = static_cast<std::size_t>(start); j < selected.size(); ++j) {
    if (selected[j]) break;
    allowed[j] = true;
  }
  return allowed;
}

SentenceContext::SentenceContext(const Model& model, Tape& tape,
                                 const SentenceInstance& inst)
    : model_(&model) {
  Var e = embed_tokens(tape, inst, model.embedder, model.vocab());
  tokens_ = encode_sentence(e, inst.dep_heads, model.sentence);
}

Var SentenceContext::span(const Span& s) {
  auto it = spans_.find(s);
  if (it != spans_.end()) return it->second;
  Var q = span_representation(tokens_, s.start, s.end, model_->span_ffn);
  spans_.emplace(s, q);
  return q;
}

Var graph_state(const Model& model, SentenceContext& ctx, const Var& node_reprs,
                const PartialFsg& fsg) {
  Var target = ctx.span(fsg.target);
  std::vector<Var> args;
  args.reserve(fsg.arguments.size());
  for (const auto& a : fsg.arguments) args.push_back(ctx.span(a.span));
  if (model.config().use_fsg_decoder) {
    return encode_fsg(target, args, node_reprs, fsg, model.fsg);
  }
  std::vector<Var> history;
  history.reserve(args.size());
  for (std::size_t j = 0; j < args.size(); ++j) {
    history.push_back(ad::hcat(args[j], ad::row(node_reprs, fsg.arguments[j].role)));
  }
  return lstm_decoder_step(ad::hcat(target, ad::row(node_reprs, fsg.frame)),
                           history, model.history);
}

Distribution frame_distribution(const Model& model, SentenceContext& ctx,
                                const Var& node_reprs,
                                const SentenceInstance& inst,
                                std::span<const int> candidates) {
  Var target = ctx.span(inst.target);
  if (model.config().fi_use_fkg) {
    return identify_frame(target, node_reprs, model.frame_ffn, candidates);
  }
  return identify_frame_linear(target, model.frame_classifier, candidates);
}

ParseResult decode_structure(const Model& model, const SentenceInstance& inst,
                             std::optional<int> frame_override,
                             DecodeTrace* trace) {
  const auto& fkg = model.fkg();
  Tape tape;
  Var y = model.node_representations(tape);
  SentenceContext ctx(model, tape, inst);
  const int n = ctx.length();

  ParseResult result;
  if (frame_override) {
    if (*frame_override < 0 || *frame_override >= fkg.frame_count) {
      throw std::out_of_range("frame override out of range");
    }
    result.frame = *frame_override;
    result.frame_prob = 1.0;
  } else {
    const auto candidates = candidate_frames(model.ontology(), target_lemma_key(inst));
    Distribution fd = frame_distribution(model, ctx, y, inst, candidates);
    result.frame = fd.best();
    result.frame_prob = fd.prob(fd.argmax());
    if (trace) {
      std::vector<bool> allowed(static_cast<std::size_t>(fkg.frame_count), false);
      for (int c : candidates) allowed[static_cast<std::size_t>(c)] = true;
      trace->entries.push_back({fd.dense(fkg.frame_count), allowed});
    }
  }

  const auto roles = candidate_roles(fkg, result.frame);
  std::vector<bool> role_allowed(static_cast<std::size_t>(fkg.node_count), false);
  for (int r : roles) role_allowed[static_cast<std::size_t>(r)] = true;

  PartialFsg fsg{inst.target, result.frame, {}};
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  for (int iter = 0; iter < n; ++iter) {
    auto starts = start_positions(selected);
    if (std::none_of(starts.begin(), starts.end(), [](bool b) { return b; })) break;
    if (trace) {
      const UndirectedGraph star = fsg.graph();
      int degree = 0;
      for (const auto& [a, b] : star.edges) degree += (a == 0 || b == 0) ? 1 : 0;
      trace->steps.push_back({fsg.step(), star.node_count, degree});
    }
    Var g = graph_state(model, ctx, y, fsg);
    Distribution sd = point_boundary(g, ctx.tokens(), model.start_ffn, starts);
    const int s = sd.best();
    auto ends = end_positions(selected, s);
    Distribution ed = point_boundary(g, ctx.tokens(), model.end_ffn, ends);
    const int e = ed.best();
    const Span span{s, e};
    Distribution rd = classify_role(g, ctx.span(span), y, model.role_ffn, roles);
    const int role = rd.best();
    if (trace) {
      trace->entries.push_back({sd.dense(n), starts});
      trace->entries.push_back({ed.dense(n), ends});
      trace->entries.push_back({rd.dense(fkg.node_count), role_allowed});
    }
    if (role == fkg.dummy_index) break;
    result.arguments.push_back(
        {span, role, sd.prob(sd.argmax()), ed.prob(ed.argmax()), rd.prob(rd.argmax())});
    fsg.arguments.push_back({span, role});
    for (int i = s; i <= e; ++i) selected[static_cast<std::size_t>(i)] = true;
  }
  return result;
}

}  // namespace dgparse
