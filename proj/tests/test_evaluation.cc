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

#include <random>

#include "doctest.h"
#include "dgparse/evaluation.h"
#include "checks.h"
#include "oracles.h"

namespace {

using namespace dgparse;
using Items = std::vector<ArgumentItem>;

TargetPrediction target(int gold_frame, int pred_frame, Items gold, Items pred) {
  return {gold_frame, pred_frame, std::move(gold), std::move(pred)};
}

SentenceInstance labeled(const std::string& lemma, const std::string& frame, int id) {
  SentenceInstance s;
  s.tokens = {lemma + "s", "x" + std::to_string(id)};
  s.lemmas = {lemma, "x"};
  s.pos_tags = {"VB", "NN"};
  s.dep_heads = {-1, 0};
  s.target = {0, 0};
  s.frame = frame;
  s.arguments = std::vector<GoldArgument>{};
  return s;
}

}  // namespace

TEST_CASE("argument matching") {
  Items a = {{{0, 1}, 1}, {{3, 5}, 2}};
  Items g = {{{0, 1}, 1}, {{3, 4}, 2}};
  CHECK(match_arguments(a, a) == 2);
  CHECK(match_arguments(a, Items{{{7, 7}, 1}}) == 0);
  CHECK(match_arguments(a, g) == 1);
  Items dup = {{{0, 1}, 1}, {{0, 1}, 1}};
  CHECK(match_arguments(dup, Items{{{0, 1}, 1}}) == 1);
  CHECK(match_arguments(dup, dup) == 2);
  CHECK(match_arguments(Items{{{0, 1}, 2}}, Items{{{0, 1}, 1}}) == 0);
}

TEST_CASE("argument P/R/F1") {
  std::vector<TargetPrediction> perfect = {target(0, 0, {{{0, 1}, 1}}, {{{0, 1}, 1}})};
  auto p = arg_prf(perfect);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);
  std::vector<TargetPrediction> none = {target(0, 0, {{{0, 1}, 1}}, {})};
  p = arg_prf(none);
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
  std::vector<TargetPrediction> half = {target(0, 0, {{{0, 1}, 1}, {{3, 4}, 2}}, {{{0, 1}, 1}, {{3, 5}, 2}})};
  p = arg_prf(half);
  CHECK(p.precision == 0.5);
  CHECK(p.recall == 0.5);
  CHECK(p.f1 == 0.5);
  CHECK(make_prf(0, 0, 0).f1 == 0.0);
}

TEST_CASE("full-structure P/R/F1") {
  std::vector<TargetPrediction> miss = {target(0, 1, {}, {})};
  auto p = full_structure_prf(miss);
  CHECK(p.matched == 0);
  CHECK(p.gold == 1);
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  std::vector<TargetPrediction> two_thirds = {target(0, 0, {{{0, 1}, 1}, {{3, 4}, 2}}, {{{0, 1}, 1}, {{3, 5}, 2}})};
  p = full_structure_prf(two_thirds);
  CHECK(p.matched == 2);
  CHECK(p.predicted == 3);
  CHECK(p.gold == 3);
  CHECK(std::abs(p.precision - 2.0 / 3) <= 1e-15);
  CHECK(std::abs(p.recall - 2.0 / 3) <= 1e-15);
  CHECK(std::abs(p.f1 - 2.0 / 3) <= 1e-15);
  std::vector<TargetPrediction> perfect = {target(2, 2, {{{1, 1}, 4}}, {{{1, 1}, 4}}), target(1, 1, {}, {})};
  CHECK(full_structure_prf(perfect).f1 == 1.0);
}

TEST_CASE("frame accuracy") {
  std::vector<TargetPrediction> four = {target(0, 0, {}, {}), target(1, 1, {}, {}), target(2, 0, {}, {}),
                                        target(1, 1, {}, {})};
  CHECK(frame_accuracy(four) == 0.75);
  four[2].predicted_frame = 2;
  CHECK(frame_accuracy(four) == 1.0);
  for (auto& t : four) t.predicted_frame = 9;
  CHECK(frame_accuracy(four) == 0.0);
  CHECK(frame_accuracy({}) == 0.0);
}

TEST_CASE("metrics agree with the brute-force oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto preds = oracle::random_predictions(rng);
    auto arg = arg_prf(preds);
    auto full = full_structure_prf(preds);
    auto oa = oracle::arg_scores(preds);
    auto of = oracle::full_scores(preds);
    REQUIRE(arg.precision == doctest::Approx(oa.p).epsilon(1e-12));
    REQUIRE(arg.recall == doctest::Approx(oa.r).epsilon(1e-12));
    REQUIRE(arg.f1 == doctest::Approx(oa.f).epsilon(1e-12));
    REQUIRE(full.precision == doctest::Approx(of.p).epsilon(1e-12));
    REQUIRE(full.recall == doctest::Approx(of.r).epsilon(1e-12));
    REQUIRE(full.f1 == doctest::Approx(of.f).epsilon(1e-12));
    for (const auto& t : preds) {
      // The match count is symmetric in its arguments.
      REQUIRE(match_arguments(t.predicted, t.gold) == match_arguments(t.gold, t.predicted));
    }
    // Adding a correct prediction never lowers recall.
    auto more = preds;
    if (!more[0].gold.empty()) {
      more[0].predicted.push_back(more[0].gold[0]);
      REQUIRE(arg_prf(more).recall >= arg.recall);
    }
  }
}

TEST_CASE("reports serialize") {
  MetricReport r;
  r.targets = 4;
  r.frames_correct = 3;
  r.frame_accuracy = 0.75;
  r.arg = make_prf(1, 2, 2);
  r.full = make_prf(2, 3, 3);
  CHECK(report_from_json(report_to_json(r)) == r);
  CHECK(format_report_table(r).find("0.7500") != std::string::npos);
}

TEST_CASE("gold structure uses FKG indices") {
  auto data = checks::three_frame_data(5);
  auto fkg = build_fkg(data.ontology);
  const auto& inst = data.train.instances[0];
  auto t = gold_structure(inst, fkg);
  CHECK(t.gold_frame == fkg.frame_index.at(*inst.frame));
  REQUIRE(t.gold.size() == inst.arguments->size());
  for (std::size_t a = 0; a < t.gold.size(); ++a) {
    CHECK(t.gold[a].role == fkg.fe_index.at({*inst.frame, (*inst.arguments)[a].role}));
  }
  auto bad = inst;
  bad.frame = "Missing";
  CHECK_THROWS_AS(gold_structure(bad, fkg), std::invalid_argument);
}

TEST_CASE("evaluate decodes with and without the gold frame") {
  auto data = checks::three_frame_data(6);
  auto cfg = checks::small_train_config();
  auto ont = std::make_shared<const FrameOntology>(data.ontology);
  Model m(cfg.model, ont, checks::vocab_of(data.train), 3);
  auto report = evaluate(m, data.test);
  CHECK(report.targets == static_cast<long>(data.test.size()));
  CHECK(report.frame_accuracy >= 0.0);
  CHECK(report.frame_accuracy <= 1.0);
  CHECK(report.full.gold == report.targets + report.arg.gold);
  auto gold_only = evaluate(m, data.test, true);
  CHECK(gold_only.frame_accuracy == 1.0);
  CHECK(gold_only.arg == report.arg);
  CHECK(evaluate(m, data.test) == report);
}

TEST_CASE("few-shot splits") {
  Corpus corpus;
  int id = 0;
  for (int i = 0; i < 10; ++i) corpus.instances.push_back(labeled("get", "Held", id++));
  for (int i = 0; i < 10; ++i) corpus.instances.push_back(labeled("obtain", "Held", id++));
  for (int i = 0; i < 3; ++i) corpus.instances.push_back(labeled("acquire", "Held2", id++));
  for (int i = 0; i < 30; ++i) corpus.instances.push_back(labeled("see", "Seen", id++));
  const std::set<std::string> lemmas = {"get"};
  const std::set<std::string> frames = {"Held", "Held2"};
  auto count = [](const Corpus& c, const std::string& frame) {
    return std::count_if(c.instances.begin(), c.instances.end(),
                         [&](const SentenceInstance& s) { return *s.frame == frame; });
  };
  auto has_get = [](const Corpus& c) {
    return std::any_of(c.instances.begin(), c.instances.end(),
                       [](const SentenceInstance& s) { return s.lemmas[0] == "get"; });
  };

  auto zero = make_fewshot_split(corpus, lemmas, frames, 0, 1);
  CHECK(zero.test.size() == 10u);
  CHECK(count(zero.train, "Held") == 0);
  CHECK(count(zero.train, "Held2") == 0);
  CHECK(count(zero.dev, "Held") == 0);
  CHECK(zero.train.size() + zero.dev.size() == 30u);

  auto four = make_fewshot_split(corpus, lemmas, frames, 4, 1);
  CHECK(count(four.train, "Held") == 4);
  CHECK(count(four.train, "Held2") == 3);
  CHECK_FALSE(has_get(four.train));
  CHECK_FALSE(has_get(four.dev));
  auto again = make_fewshot_split(corpus, lemmas, frames, 4, 1);
  CHECK(again.train.instances == four.train.instances);
  CHECK(again.dev.instances == four.dev.instances);

  auto full = make_fewshot_split(corpus, lemmas, frames, std::nullopt, 1);
  CHECK(count(full.train, "Held") == 10);
  CHECK(count(full.train, "Held2") == 3);
  CHECK_FALSE(has_get(full.train));
  CHECK(full.test.size() == 10u);

  CHECK_THROWS_AS(make_fewshot_split(corpus, lemmas, frames, -1, 1), std::invalid_argument);
}
