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

// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset. Exits non-zero when any criterion
// fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "checks.h"
#include "dgparse/decoder.h"
#include "dgparse/evaluation.h"
#include "dgparse/fkg_encoder.h"
#include "dgparse/synthetic.h"
#include "dgparse/training.h"
#include "oracles.h"

namespace {

using namespace dgparse;
using M = Eigen::MatrixXd;

// Tolerances and budgets.
constexpr int kOracleCases = 100;
constexpr int kOracleMaxSize = 8;
constexpr double kOracleTolerance = 1e-6;
constexpr double kGradientTolerance = 1e-3;
// Largest share of entries that may sit on a kink and be left out.
constexpr double kGradientKinkShare = 0.05;
constexpr double kOverfitTrainF1 = 0.99;
constexpr double kOverfitDevF1 = 0.90;
constexpr int kOverfitMaxEpochs = 300;
constexpr int kOverfitCheckEvery = 5;
constexpr int kTransferEpochs = 25;
constexpr double kTransferNoFkgCeiling = 5.0;
constexpr int kInvariantCases = 1000;
constexpr double kProbabilityTolerance = 1e-6;
constexpr int kMetricCases = 50;
constexpr double kMetricTolerance = 1e-12;
constexpr int kAblationEpochs = 3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e300;
  double w = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

double max_diff(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

// Training-scale model dimensions shared by the training criteria.
TrainConfig trained_config(std::uint64_t seed, int epochs) {
  TrainConfig cfg;
  cfg.learning_rate = 2e-3;
  cfg.batch_size = 16;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.model.hidden_dim = 64;
  cfg.model.node_dim = 32;
  cfg.model.word_dim = 32;
  cfg.model.lemma_dim = 16;
  cfg.model.pos_dim = 8;
  cfg.model.indicator_dim = 8;
  return cfg;
}

std::unique_ptr<Model> scaled_model(std::uint64_t seed, const FrameOntology& ont, const ModelConfig& cfg,
                                    double scale) {
  auto model = std::make_unique<Model>(cfg, std::make_shared<const FrameOntology>(ont), oracle::small_vocab(),
                                       seed);
  for (Param* p : model->params().all()) p->value *= scale;
  return model;
}

// ---------------------------------------------------------------------------
// 1. Each component against its brute-force evaluation.

Outcome oracle_agreement() {
  std::mt19937_64 rng(101);
  std::map<std::string, double> worst;
  std::map<std::string, int> cases;

  for (int t = 0; t < kOracleCases; ++t) {
    const int n = oracle::uniform_int(rng, 1, kOracleMaxSize);
    const int din = oracle::uniform_int(rng, 1, 5), dout = oracle::uniform_int(rng, 1, 5);
    UndirectedGraph g{n, oracle::random_edges(rng, n, 0.4)};
    Params store;
    auto layer = make_graph_conv(store, "g", din, dout, Activation::kRelu, rng);
    M h = oracle::random_matrix(rng, n, din);
    Tape tape;
    worst["gcn"] = std::max(worst["gcn"], max_diff(gcn_layer(tape.constant(h), g, layer).value(),
                                                   oracle::gcn(h, g.edges, layer.weight->value, Activation::kRelu)));
    ++cases["gcn"];
  }

  for (int t = 0; t < kOracleCases; ++t) {
    const int n = oracle::uniform_int(rng, 1, kOracleMaxSize);
    const int din = oracle::uniform_int(rng, 1, 5), dout = oracle::uniform_int(rng, 1, 5);
    RelationalGraph g{n, {}};
    for (int r = 0; r < kFkgRelationCount; ++r) g.relations.push_back(oracle::random_edges(rng, n, 0.35));
    Params store;
    auto layer = make_rel_graph_conv(store, "r", din, dout, kFkgRelationCount, Activation::kTanh, rng);
    std::vector<M> wr;
    for (auto* w : layer.relation_weights) wr.push_back(w->value);
    M h = oracle::random_matrix(rng, n, din);
    Tape tape;
    worst["rgcn"] = std::max(worst["rgcn"],
                             max_diff(rgcn_layer(tape.constant(h), g, layer).value(),
                                      oracle::rgcn(h, g.relations, layer.self_weight->value, wr, Activation::kTanh)));
    ++cases["rgcn"];
  }

  // Small ontologies from the generator, kept when the graph has at most
  // kOracleMaxSize nodes.
  for (std::uint64_t seed = 1; cases["encode_fkg"] < kOracleCases; ++seed) {
    auto fkg = build_fkg(oracle::random_ontology(seed, 2));
    if (fkg.node_count > kOracleMaxSize) continue;
    std::array<bool, kFkgRelationCount> enabled{};
    for (auto& b : enabled) b = oracle::uniform_int(rng, 0, 3) > 0;
    Params store;
    auto enc = make_knowledge_encoder(store, fkg, 4, oracle::uniform_int(rng, 1, 2), seed, seed % 2 == 0, true,
                                      enabled);
    for (auto& layer : enc.layers) {
      layer.self_weight->value = oracle::random_matrix(rng, 4, 4);
      for (auto* w : layer.relation_weights) w->value = oracle::random_matrix(rng, 4, 4);
    }
    Tape tape;
    worst["encode_fkg"] = std::max(worst["encode_fkg"], max_diff(encode_fkg(tape, enc).value(),
                                                                 oracle::encode_fkg(fkg, enc, enabled)));
    ++cases["encode_fkg"];
  }

  {
    auto ont = oracle::random_ontology(5, 3);
    auto model = scaled_model(5, ont, oracle::tiny_config(), 1.0);
    const auto roles = candidate_roles(model->fkg(), 0);
    Tape tape;
    Var y = model->node_representations(tape);
    for (int t = 0; t < kOracleCases; ++t) {
      const int tau = oracle::uniform_int(rng, 0, kOracleMaxSize - 1);
      M target = oracle::random_matrix(rng, 1, 8);
      PartialFsg fsg{{0, 0}, 0, {}};
      std::vector<Var> args;
      std::vector<M> values;
      std::vector<int> arg_roles;
      for (int j = 0; j < tau; ++j) {
        values.push_back(oracle::random_matrix(rng, 1, 8));
        args.push_back(tape.constant(values.back()));
        arg_roles.push_back(
            roles[static_cast<std::size_t>(oracle::uniform_int(rng, 0, static_cast<int>(roles.size()) - 2))]);
        fsg.arguments.push_back({{j, j}, arg_roles.back()});
      }
      M got = encode_fsg(tape.constant(target), args, y, fsg, model->fsg).value();
      worst["encode_fsg"] = std::max(
          worst["encode_fsg"], max_diff(got, oracle::encode_fsg(target, values, y.value(), 0, arg_roles, model->fsg)));
      ++cases["encode_fsg"];
    }
  }

  {
    Params store;
    auto frame_ffn = make_feed_forward(store, "f", 4, 4, 4, 2, rng);
    auto start_ffn = make_feed_forward(store, "p", 4, 5, 5, 2, rng);
    auto role_ffn = make_feed_forward(store, "r", 7, 4, 4, 2, rng);
    for (int t = 0; t < kOracleCases; ++t) {
      Tape tape;
      const int frames = oracle::uniform_int(rng, 1, kOracleMaxSize);
      M target = oracle::random_matrix(rng, 1, 4), y = oracle::random_matrix(rng, frames, 4);
      std::vector<int> cands;
      for (int f = 0; f < frames; ++f)
        if (oracle::uniform_int(rng, 0, 1)) cands.push_back(f);
      if (cands.empty()) cands.push_back(oracle::uniform_int(rng, 0, frames - 1));
      auto d = identify_frame(tape.constant(target), tape.constant(y), frame_ffn, cands);
      worst["identify_frame"] = std::max(worst["identify_frame"],
                                         max_diff(d.dense(frames), oracle::identify_frame(target, y, frame_ffn,
                                                                                          cands, frames)));
      ++cases["identify_frame"];

      const int n = oracle::uniform_int(rng, 1, kOracleMaxSize);
      M g = oracle::random_matrix(rng, 1, 4), h = oracle::random_matrix(rng, n, 5);
      std::vector<bool> mask(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = oracle::uniform_int(rng, 0, 2) > 0;
      mask[static_cast<std::size_t>(oracle::uniform_int(rng, 0, n - 1))] = true;
      auto p = point_boundary(tape.constant(g), tape.constant(h), start_ffn, mask);
      worst["point_boundary"] = std::max(worst["point_boundary"],
                                         max_diff(p.dense(n), oracle::point_boundary(g, h, start_ffn, mask)));
      ++cases["point_boundary"];

      const int nodes = oracle::uniform_int(rng, 1, kOracleMaxSize);
      M gg = oracle::random_matrix(rng, 1, 4), span = oracle::random_matrix(rng, 1, 3);
      M yy = oracle::random_matrix(rng, nodes, 4);
      std::vector<int> roles;
      for (int r = 0; r + 1 < nodes; ++r)
        if (oracle::uniform_int(rng, 0, 1)) roles.push_back(r);
      roles.push_back(nodes - 1);
      auto r = classify_role(tape.constant(gg), tape.constant(span), tape.constant(yy), role_ffn, roles);
      worst["classify_role"] = std::max(worst["classify_role"],
                                        max_diff(r.dense(nodes), oracle::classify_role(gg, span, yy, role_ffn, roles)));
      ++cases["classify_role"];
    }
  }

  Outcome out{true, ""};
  for (const auto& [name, w] : worst) {
    out.pass = out.pass && w <= kOracleTolerance && cases[name] >= kOracleCases;
    out.detail += name + " " + fmt(w, 2) + " (" + std::to_string(cases[name]) + ") ";
  }
  out.detail += "tol " + fmt(kOracleTolerance, 2);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Analytic gradients of the joint loss against central differences.

Outcome gradient_check() {
  auto data = checks::three_frame_data(3, 6);
  // Every lemma evokes every frame so the frame term has a non-zero gradient.
  FrameOntology ambiguous = data.ontology;
  std::vector<std::string> all_frames;
  for (const auto& f : ambiguous.frames) all_frames.push_back(f.name);
  for (auto& [lemma, frames] : ambiguous.lexicon) frames = all_frames;
  auto ont = std::make_shared<const FrameOntology>(ambiguous);
  std::vector<const SentenceInstance*> batch;
  for (std::size_t i = 0; i < 3; ++i) batch.push_back(&data.train.instances[i]);
  Outcome out{true, ""};
  for (bool fsg : {true, false}) {
    auto cfg = checks::small_train_config(8);
    cfg.model.use_fsg_decoder = fsg;
    Model model(cfg.model, ont, checks::vocab_of(data.train), 3);
    // Zero-initialized biases can leave ReLU inputs exactly at the kink when a
    // whole hidden layer is inactive; jitter every entry to reach a generic
    // point where the loss is differentiable.
    std::mt19937_64 rng(33);
    for (Param* p : model.params().all())
      p->value += oracle::random_matrix(rng, static_cast<int>(p->value.rows()), static_cast<int>(p->value.cols()), 0.05);
    auto report = checks::loss_gradient_check(model, batch, cfg);
    std::string worst_group;
    for (const auto& [g, e] : report.group_error)
      if (worst_group.empty() || e > report.group_error[worst_group]) worst_group = g;
    const bool all_live = std::all_of(report.group_norm.begin(), report.group_norm.end(),
                                      [](const auto& g) { return g.second > 0; });
    const bool few_kinks = static_cast<double>(report.kinks) <= kGradientKinkShare * static_cast<double>(report.checked + report.kinks);
    out.pass = out.pass && all_live && few_kinks && report.worst() <= kGradientTolerance;
    out.detail += std::string(fsg ? "fsg" : "lstm") + " worst " + fmt(report.worst(), 2) + " (" + worst_group +
                  ", " + std::to_string(report.group_error.size()) + " groups, " +
                  std::to_string(report.checked) + " entries, " + std::to_string(report.kinks) + " at kinks) ";
  }
  out.detail += "tol " + fmt(kGradientTolerance, 2);
  return out;
}

// ---------------------------------------------------------------------------
// 3. Memorizing the default synthetic training corpus.

Outcome overfit() {
  auto data = generate_synthetic(SyntheticSpec{});
  auto ont = std::make_shared<const FrameOntology>(data.ontology);
  auto cfg = trained_config(1, kOverfitMaxEpochs);
  double train_f1 = 0, dev_f1 = 0;
  int reached = 0;
  TrainOptions opts;
  opts.on_epoch = [&](const EpochRecord& r) {
    if (r.epoch % kOverfitCheckEvery != 0) return true;
    train_f1 = evaluate(*r.model, data.train).full.f1;
    dev_f1 = r.dev ? r.dev->full.f1 : 0.0;
    if (train_f1 >= kOverfitTrainF1) {
      reached = r.epoch;
      return false;
    }
    return true;
  };
  train(data.train, data.dev, ont, cfg, opts);
  Outcome out;
  out.pass = reached > 0 && dev_f1 >= kOverfitDevF1;
  out.detail = "train full F1 " + fmt(train_f1) + " at epoch " + std::to_string(reached) + " (need " +
               fmt(kOverfitTrainF1) + " within " + std::to_string(kOverfitMaxEpochs) + "), dev full F1 " +
               fmt(dev_f1) + " (need " + fmt(kOverfitDevF1) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Transfer to a held-out frame family, with and without the FKG.

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

Outcome transfer() {
  const std::vector<int> shots = {0, 4, 16};
  std::map<int, std::vector<double>> with_fkg, without_fkg, gap;
  std::string table;
  for (std::uint64_t seed : {1, 2, 3}) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.train_count = 400;
    auto data = generate_synthetic(spec);
    Corpus all = data.train;
    for (const Corpus* c : {&data.dev, &data.test})
      all.instances.insert(all.instances.end(), c->instances.begin(), c->instances.end());
    auto ont = std::make_shared<const FrameOntology>(data.ontology);
    std::set<std::string> lemmas(data.held_lemmas.begin(), data.held_lemmas.end());
    std::set<std::string> frames(data.held_frames.begin(), data.held_frames.end());
    for (int k : shots) {
      auto split = make_fewshot_split(all, lemmas, frames, k, seed);
      double f[2] = {0, 0};
      for (int use = 0; use <= 1; ++use) {
        auto cfg = trained_config(seed, kTransferEpochs);
        cfg.model.use_fkg = use == 1;
        auto ckpt = train(split.train, split.dev, ont, cfg);
        auto model = restore_model(ckpt, ont);
        f[use] = 100.0 * evaluate(*model, split.test, true).arg.f1;
      }
      with_fkg[k].push_back(f[1]);
      without_fkg[k].push_back(f[0]);
      gap[k].push_back(f[1] - f[0]);
      table += " s" + std::to_string(seed) + "K" + std::to_string(k) + " " + fmt(f[1], 3) + "/" + fmt(f[0], 3);
    }
  }
  bool fkg_wins = true;
  for (std::size_t s = 0; s < with_fkg[0].size(); ++s) fkg_wins = fkg_wins && with_fkg[0][s] > without_fkg[0][s];
  double no_fkg_mean = 0;
  for (double v : without_fkg[0]) no_fkg_mean += v / static_cast<double>(without_fkg[0].size());
  const bool near_zero = no_fkg_mean <= kTransferNoFkgCeiling;
  const bool shrinking = median(gap[0]) > median(gap[16]);
  Outcome out;
  out.pass = fkg_wins && near_zero && shrinking;
  out.detail = std::string("FKG beats no-FKG at K=0 in every seed: ") + (fkg_wins ? "yes" : "no") +
               "; no-FKG K=0 mean Arg F1 " + fmt(no_fkg_mean) + " (need <= " + fmt(kTransferNoFkgCeiling) +
               "): " + (near_zero ? "yes" : "no") + "; median gap K=0 " + fmt(median(gap[0])) + " vs K=16 " +
               fmt(median(gap[16])) + ": " + (shrinking ? "yes" : "no") + ";" + table;
  return out;
}

// ---------------------------------------------------------------------------
// 5. Decoder output invariants on random models and sentences.

Outcome decode_invariants() {
  std::mt19937_64 rng(505);
  long violations = 0, arguments = 0, distributions = 0;
  std::string first;
  auto fail = [&](const std::string& what, int trial) {
    if (violations++ == 0) first = what + " in case " + std::to_string(trial);
  };
  for (int trial = 0; trial < kInvariantCases; ++trial) {
    auto ont = oracle::random_ontology(static_cast<std::uint64_t>(trial) + 1, 2 + trial % 5);
    auto cfg = oracle::tiny_config();
    cfg.use_fsg_decoder = trial % 3 != 0;
    cfg.fi_use_fkg = trial % 5 != 0;
    cfg.use_fkg = trial % 7 != 0;
    auto model = scaled_model(static_cast<std::uint64_t>(trial) + 9, ont, cfg, 3.0);
    auto inst = oracle::random_sentence(rng, oracle::uniform_int(rng, 1, 10));
    std::optional<int> forced;
    if (trial % 4 == 0) forced = oracle::uniform_int(rng, 0, model->fkg().frame_count - 1);
    DecodeTrace trace;
    auto result = decode_structure(*model, inst, forced, &trace);
    const auto& fkg = model->fkg();
    if (forced && result.frame != *forced) fail("forced frame ignored", trial);
    if (!forced) {
      auto cands = candidate_frames(model->ontology(), target_lemma_key(inst));
      if (std::find(cands.begin(), cands.end(), result.frame) == cands.end()) fail("frame outside lexicon", trial);
    }
    if (static_cast<int>(result.arguments.size()) > inst.length()) fail("too many arguments", trial);
    const auto roles = candidate_roles(fkg, result.frame);
    for (std::size_t a = 0; a < result.arguments.size(); ++a) {
      const auto& arg = result.arguments[a];
      if (arg.span.start < 0 || arg.span.end >= inst.length() || arg.span.start > arg.span.end)
        fail("span out of range", trial);
      if (arg.role == fkg.dummy_index) fail("dummy role emitted", trial);
      if (std::find(roles.begin(), roles.end(), arg.role) == roles.end()) fail("role outside frame", trial);
      for (std::size_t b = 0; b < a; ++b)
        if (arg.span.overlaps(result.arguments[b].span)) fail("overlapping spans", trial);
      ++arguments;
    }
    for (const auto& e : trace.entries) {
      double total = 0;
      for (std::size_t i = 0; i < e.probs.size(); ++i) {
        if (!e.allowed[i] && e.probs[i] != 0.0) fail("mass on a masked item", trial);
        if (e.probs[i] < 0.0) fail("negative probability", trial);
        total += e.probs[i];
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) fail("distribution does not sum to one", trial);
      ++distributions;
    }
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      const auto& s = trace.steps[k];
      if (s.tau != static_cast<int>(k) || s.graph_nodes != s.tau + 1 || s.target_degree != s.tau)
        fail("graph growth", trial);
    }
    // One step per emitted argument plus the stopping step, which is skipped
    // only when the arguments cover the whole sentence.
    int covered = 0;
    for (const auto& arg : result.arguments) covered += arg.span.end - arg.span.start + 1;
    const std::size_t steps = result.arguments.size() + (covered == inst.length() ? 0 : 1);
    if (trace.steps.size() != steps) fail("step count", trial);
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(kInvariantCases) + " cases, " + std::to_string(arguments) + " arguments, " +
               std::to_string(distributions) + " distributions, " + std::to_string(violations) + " violations" +
               (first.empty() ? "" : " (first: " + first + ")");
  return out;
}

// ---------------------------------------------------------------------------
// 6. Metrics against the brute-force oracle and a worked example.

Outcome metrics() {
  std::mt19937_64 rng(606);
  double worst = 0;
  bool symmetric = true;
  for (int t = 0; t < kMetricCases; ++t) {
    auto preds = oracle::random_predictions(rng);
    auto arg = arg_prf(preds);
    auto full = full_structure_prf(preds);
    auto oa = oracle::arg_scores(preds);
    auto of = oracle::full_scores(preds);
    for (double d : {arg.precision - oa.p, arg.recall - oa.r, arg.f1 - oa.f, full.precision - of.p,
                     full.recall - of.r, full.f1 - of.f})
      worst = std::max(worst, std::abs(d));
    for (const auto& tp : preds)
      symmetric = symmetric && match_arguments(tp.predicted, tp.gold) == match_arguments(tp.gold, tp.predicted);
  }
  // Two of three predictions correct against three gold arguments, plus a
  // correct frame: arguments give 2/3, the full structure 3/4.
  std::vector<TargetPrediction> example = {
      {0, 0, {{{0, 0}, 3}, {{2, 3}, 4}, {{5, 5}, 5}}, {{{0, 0}, 3}, {{2, 3}, 4}, {{5, 5}, 4}}}};
  const double ex_arg = arg_prf(example).f1, ex_full = full_structure_prf(example).f1;
  const bool example_ok = std::abs(ex_arg - 2.0 / 3.0) <= kMetricTolerance && std::abs(ex_full - 0.75) <= kMetricTolerance;
  Outcome out;
  out.pass = worst <= kMetricTolerance && symmetric && example_ok;
  out.detail = std::to_string(kMetricCases) + " random cases, max diff " + fmt(worst, 2) + ", matching symmetric " +
               (symmetric ? "yes" : "no") + "; example Arg F1 " + fmt(ex_arg) + " full F1 " + fmt(ex_full);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Every ablation switch trains and reports.

long parameter_count(const Model& m) {
  long n = 0;
  for (const Param* p : m.params().all()) n += static_cast<long>(p->value.size());
  return n;
}

Outcome ablations() {
  SyntheticSpec spec;
  spec.train_count = 100;
  auto data = generate_synthetic(spec);
  auto ont = std::make_shared<const FrameOntology>(data.ontology);
  auto base = checks::small_train_config(16);
  base.learning_rate = 2e-3;
  base.epochs = kAblationEpochs;
  std::vector<std::pair<std::string, ModelConfig>> variants = {{"full", base.model}};
  auto add = [&](const std::string& name, auto&& edit) {
    ModelConfig c = base.model;
    edit(c);
    variants.emplace_back(name, c);
  };
  add("no-fkg", [](ModelConfig& c) { c.use_fkg = false; });
  add("no-fsg", [](ModelConfig& c) { c.use_fsg_decoder = false; });
  add("no-sharing", [](ModelConfig& c) { c.name_sharing = false; });
  add("fi-linear", [](ModelConfig& c) { c.fi_use_fkg = false; });
  for (int r = 0; r < kFkgRelationCount; ++r)
    add(std::string("no-") + relation_name(static_cast<FkgRelation>(r)), [r](ModelConfig& c) { c.enabled_relations[static_cast<std::size_t>(r)] = false; });

  Outcome out{true, ""};
  std::map<std::string, long> counts;
  for (const auto& [name, mc] : variants) {
    auto cfg = base;
    cfg.model = mc;
    auto ckpt = train(data.train, data.dev, ont, cfg);
    auto model = restore_model(ckpt, ont);
    counts[name] = parameter_count(*model);
    auto report = evaluate(*model, data.test);
    const bool sane = report.targets == static_cast<long>(data.test.size()) && std::isfinite(report.full.f1) &&
                      report.full.f1 >= 0 && report.full.f1 <= 1;
    out.pass = out.pass && sane;
    out.detail += name + " " + fmt(report.full.f1, 3) + " ";
  }
  const long dn = base.model.node_dim;
  const long rgcn = static_cast<long>(base.model.fkg_layers) * (kFkgRelationCount + 1) * dn * dn;
  const bool count_ok = counts["full"] - counts["no-fkg"] == rgcn;
  out.pass = out.pass && count_ok;
  out.detail += "; parameters full " + std::to_string(counts["full"]) + " no-fkg " + std::to_string(counts["no-fkg"]) +
                " (difference " + std::to_string(counts["full"] - counts["no-fkg"]) + ", RGCN weights " +
                std::to_string(rgcn) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Training and evaluation are deterministic.

Outcome determinism() {
  auto data = checks::three_frame_data(8, 24);
  auto ont = std::make_shared<const FrameOntology>(data.ontology);
  auto cfg = checks::small_train_config(8);
  cfg.learning_rate = 2e-3;
  cfg.epochs = 4;
  auto a = train(data.train, data.dev, ont, cfg);
  auto b = train(data.train, data.dev, ont, cfg);
  const bool same_bytes = encode_checkpoint(a) == encode_checkpoint(b);
  auto ma = restore_model(a, ont);
  auto mb = restore_model(b, ont);
  const auto ra = evaluate(*ma, data.test), rb = evaluate(*mb, data.test);
  const bool same_reports = report_to_json(ra) == report_to_json(rb) && report_to_json(ra) ==
                                                                            report_to_json(evaluate(*ma, data.test));
  const auto path = std::filesystem::temp_directory_path() /
                    ("dgparse_acceptance_" + std::to_string(::getpid()) + ".ckpt");
  save_checkpoint(a, path);
  auto loaded = load_checkpoint(path);
  std::filesystem::remove(path);
  auto mc = restore_model(loaded, ont);
  const bool same_after_load = report_to_json(evaluate(*mc, data.test)) == report_to_json(ra);
  Outcome out;
  out.pass = same_bytes && same_reports && same_after_load;
  out.detail = std::string("checkpoint bytes identical: ") + (same_bytes ? "yes" : "no") +
               "; reports identical: " + (same_reports ? "yes" : "no") +
               "; reload reproduces eval: " + (same_after_load ? "yes" : "no");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  // Per-epoch training logs stay quiet unless the caller asks for them.
  ::setenv("DGPARSE_LOG_LEVEL", "1", 0);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle agreement", oracle_agreement},   {"gradient check", gradient_check},
      {"overfit", overfit},                     {"held-out transfer", transfer},
      {"decode invariants", decode_invariants}, {"metrics", metrics},
      {"ablations", ablations},                 {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria.size() << "]...\n";
      return 2;
    }
    selected.insert(c);
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << number << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
