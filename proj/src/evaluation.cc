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

#include "dgparse/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace dgparse {

using json = nlohmann::ordered_json;

long match_arguments(std::span<const ArgumentItem> predicted,
                     std::span<const ArgumentItem> gold) {
  std::vector<ArgumentItem> p(predicted.begin(), predicted.end());
  std::vector<ArgumentItem> g(gold.begin(), gold.end());
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  std::vector<ArgumentItem> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                        std::back_inserter(common));
  return static_cast<long>(common.size());
}

Prf make_prf(long matched, long predicted, long gold) {
  Prf r;
  r.matched = matched;
  r.predicted = predicted;
  r.gold = gold;
  r.precision = predicted > 0 ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
  r.recall = gold > 0 ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

Prf arg_prf(std::span<const TargetPrediction> preds) {
  long m = 0, p = 0, g = 0;
  for (const auto& t : preds) {
    m += match_arguments(t.predicted, t.gold);
    p += static_cast<long>(t.predicted.size());
    g += static_cast<long>(t.gold.size());
  }
  return make_prf(m, p, g);
}

Prf full_structure_prf(std::span<const TargetPrediction> preds) {
  long m = 0, p = 0, g = 0;
  for (const auto& t : preds) {
    m += (t.predicted_frame == t.gold_frame ? 1 : 0) + match_arguments(t.predicted, t.gold);
    p += 1 + static_cast<long>(t.predicted.size());
    g += 1 + static_cast<long>(t.gold.size());
  }
  return make_prf(m, p, g);
}

double frame_accuracy(std::span<const TargetPrediction> preds) {
  if (preds.empty()) return 0.0;
  long right = 0;
  for (const auto& t : preds) right += t.predicted_frame == t.gold_frame ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(preds.size());
}

namespace {

json prf_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
          {"matched", p.matched},     {"predicted", p.predicted}, {"gold", p.gold}};
}

Prf prf_from(const json& j) {
  return make_prf(j.at("matched").get<long>(), j.at("predicted").get<long>(),
                  j.at("gold").get<long>());
}

}  // namespace

std::string report_to_json(const MetricReport& r) {
  json j;
  j["targets"] = r.targets;
  j["frame_accuracy"] = r.frame_accuracy;
  j["frames_correct"] = r.frames_correct;
  j["arg"] = prf_json(r.arg);
  j["full"] = prf_json(r.full);
  return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  json j = json::parse(text);
  MetricReport r;
  r.targets = j.at("targets").get<long>();
  r.frames_correct = j.at("frames_correct").get<long>();
  r.frame_accuracy =
      r.targets > 0 ? static_cast<double>(r.frames_correct) / static_cast<double>(r.targets) : 0.0;
  r.arg = prf_from(j.at("arg"));
  r.full = prf_from(j.at("full"));
  return r;
}

std::string format_report_table(const MetricReport& r) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-16s %9s %9s %9s %9s %9s %9s\n", "metric", "P", "R",
                "F1", "matched", "predicted", "gold");
  out += buf;
  auto line = [&](const char* name, const Prf& p) {
    std::snprintf(buf, sizeof buf, "%-16s %9.4f %9.4f %9.4f %9ld %9ld %9ld\n", name,
                  p.precision, p.recall, p.f1, p.matched, p.predicted, p.gold);
    out += buf;
  };
  line("arg", r.arg);
  line("full-structure", r.full);
  std::snprintf(buf, sizeof buf, "%-16s %9.4f (%ld / %ld targets)\n", "frame accuracy",
                r.frame_accuracy, r.frames_correct, r.targets);
  out += buf;
  return out;
}

TargetPrediction gold_structure(const SentenceInstance& inst,
                                const FrameKnowledgeGraph& fkg) {
  if (!inst.frame || !inst.arguments) {
    throw std::invalid_argument("evaluation needs gold frame and arguments");
  }
  TargetPrediction t;
  auto f = fkg.frame_index.find(*inst.frame);
  if (f == fkg.frame_index.end()) {
    throw std::invalid_argument("unknown frame '" + *inst.frame + "'");
  }
  t.gold_frame = f->second;
  for (const auto& a : *inst.arguments) {
    auto r = fkg.fe_index.find({*inst.frame, a.role});
    if (r == fkg.fe_index.end()) {
      throw std::invalid_argument("role '" + a.role + "' not in frame '" + *inst.frame + "'");
    }
    t.gold.push_back({a.span, r->second});
  }
  return t;
}

namespace {

std::vector<ArgumentItem> items_of(const ParseResult& r) {
  std::vector<ArgumentItem> out;
  out.reserve(r.arguments.size());
  for (const auto& a : r.arguments) out.push_back({a.span, a.role});
  return out;
}

}  // namespace

MetricReport evaluate(Model& model, const Corpus& corpus, bool gold_frames_only) {
  const bool had_cache = model.has_cache();
  if (!had_cache) model.cache_node_representations();
  std::vector<TargetPrediction> forced;
  std::vector<TargetPrediction> free;
  forced.reserve(corpus.size());
  free.reserve(corpus.size());
  for (const auto& inst : corpus.instances) {
    TargetPrediction gold = gold_structure(inst, model.fkg());
    TargetPrediction f = gold;
    ParseResult with_gold = decode_structure(model, inst, gold.gold_frame);
    f.predicted_frame = with_gold.frame;
    f.predicted = items_of(with_gold);
    forced.push_back(f);
    if (!gold_frames_only) {
      TargetPrediction p = gold;
      ParseResult r = decode_structure(model, inst);
      p.predicted_frame = r.frame;
      p.predicted = items_of(r);
      free.push_back(std::move(p));
    }
  }
  if (!had_cache) model.clear_cache();

  const auto& full_source = gold_frames_only ? forced : free;
  MetricReport rep;
  rep.targets = static_cast<long>(corpus.size());
  for (const auto& t : full_source) rep.frames_correct += t.predicted_frame == t.gold_frame;
  rep.frame_accuracy = frame_accuracy(full_source);
  rep.arg = arg_prf(forced);
  rep.full = full_structure_prf(full_source);
  return rep;
}

namespace {

// Fisher-Yates driven directly by the engine so the order is the same on
// every standard library.
void seeded_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

bool lemma_held(const SentenceInstance& inst, const std::set<std::string>& held) {
  if (held.count(target_lemma_key(inst))) return true;
  std::string bare;
  for (int i = inst.target.start; i <= inst.target.end; ++i) {
    if (i > inst.target.start) bare += ' ';
    bare += inst.lemmas[static_cast<std::size_t>(i)];
  }
  return held.count(bare) > 0;
}

}  // namespace

FewshotSplit make_fewshot_split(const Corpus& corpus,
                                const std::set<std::string>& held_lemmas,
                                const std::set<std::string>& held_frames,
                                std::optional<int> k, std::uint64_t seed,
                                double dev_fraction) {
  if (k && *k < 0) throw std::invalid_argument("K must be >= 0");
  if (dev_fraction < 0 || dev_fraction >= 1) {
    throw std::invalid_argument("dev fraction must be in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  FewshotSplit out;
  out.train.provenance = "train";
  out.dev.provenance = "dev";
  out.test.provenance = "test";

  std::vector<std::size_t> regular;
  std::map<std::string, std::vector<std::size_t>> held_pool;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus.instances[i];
    const bool held_frame = inst.frame && held_frames.count(*inst.frame);
    if (held_frame && lemma_held(inst, held_lemmas)) {
      out.test.instances.push_back(inst);
    } else if (held_frame) {
      held_pool[*inst.frame].push_back(i);
    } else {
      regular.push_back(i);
    }
  }

  std::vector<std::size_t> train_idx;
  for (auto& [frame, pool] : held_pool) {
    std::vector<std::size_t> picked = pool;
    if (k) {
      seeded_shuffle(picked, rng);
      if (picked.size() > static_cast<std::size_t>(*k)) picked.resize(static_cast<std::size_t>(*k));
    }
    train_idx.insert(train_idx.end(), picked.begin(), picked.end());
  }

  std::vector<std::size_t> order = regular;
  seeded_shuffle(order, rng);
  const auto dev_count =
      static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(order.size())));
  std::vector<std::size_t> dev_idx(order.begin(), order.begin() + static_cast<long>(dev_count));
  train_idx.insert(train_idx.end(), order.begin() + static_cast<long>(dev_count), order.end());

  std::sort(train_idx.begin(), train_idx.end());
  std::sort(dev_idx.begin(), dev_idx.end());
  for (auto i : train_idx) out.train.instances.push_back(corpus.instances[i]);
  for (auto i : dev_idx) out.dev.instances.push_back(corpus.instances[i]);
  return out;
}

}  // namespace dgparse
