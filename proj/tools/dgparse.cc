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

// Command-line front end: data generation, training, evaluation, parsing,
// few-shot splits and FKG inspection.
//
// Exit status: 0 success, 1 validation or data error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dgparse/corpus.h"
#include "dgparse/evaluation.h"
#include "dgparse/logging.h"
#include "dgparse/ontology.h"
#include "dgparse/synthetic.h"
#include "dgparse/training.h"

namespace {

using namespace dgparse;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<const FrameOntology> read_ontology(const std::string& path) {
  return std::make_shared<const FrameOntology>(
      derive_mentions_from_definitions(load_ontology(path)));
}

Corpus read_corpus(const std::string& path, const FrameOntology* ont) {
  LoadStats stats;
  Corpus c = load_corpus(path, ont, &stats);
  log_info("loaded " + std::to_string(c.size()) + " instances from " + path +
           (stats.skipped ? " (" + std::to_string(stats.skipped) + " skipped)" : ""));
  return c;
}

struct Options {
  std::string spec, out, config, ontology, train, dev, pretrain, ckpt, test, report, input,
      output, corpus, predictions, log, k = "full";
  std::vector<std::string> held_lemmas, held_frames;
  std::optional<std::uint64_t> seed;
  bool gold_frames = false;
  double dev_fraction = 0.1;
};

void require(const CLI::App* cmd, std::initializer_list<std::pair<const char*, const std::string*>> flags) {
  for (const auto& [name, value] : flags) {
    if (value->empty()) {
      throw UsageError(std::string("missing required option ") + name + "\n\n" + cmd->help());
    }
  }
}

int run_gen(const Options& o) {
  SyntheticSpec spec = parse_synthetic_spec(read_file(o.spec));
  if (o.seed) spec.seed = *o.seed;
  SyntheticData data = generate_synthetic(spec);
  write_synthetic(data, o.out);
  std::cout << "wrote " << data.ontology.frames.size() << " frames, " << data.train.size()
            << "/" << data.dev.size() << "/" << data.test.size() << " train/dev/test instances to "
            << o.out << "\n";
  return kOk;
}

int run_train(const Options& o) {
  TrainConfig cfg = load_train_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  auto ont = read_ontology(o.ontology);
  Corpus train_c = read_corpus(o.train, ont.get());
  Corpus dev_c = read_corpus(o.dev, ont.get());
  std::optional<Corpus> pre;
  TrainOptions topts;
  if (!o.pretrain.empty()) {
    pre = read_corpus(o.pretrain, ont.get());
    topts.pretrain = &*pre;
  }
  topts.log_path = o.log.empty() ? o.out + ".log.jsonl" : o.log;
  Checkpoint ckpt = train(train_c, dev_c, ont, cfg, topts);
  save_checkpoint(ckpt, o.out);
  std::cout << "saved checkpoint from epoch " << ckpt.epoch << " to " << o.out << "\n";
  if (ckpt.metrics) std::cout << format_report_table(*ckpt.metrics);
  return kOk;
}

int run_validate_predictions(const Options& o) {
  auto ont = read_ontology(o.ontology);
  std::istringstream in(read_file(o.predictions));
  std::string line;
  int number = 0, bad = 0, records = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++records;
    for (const auto& v : validate_prediction_record(line, *ont)) {
      std::cerr << "line " << number << ": " << v << "\n";
      ++bad;
    }
  }
  std::cout << records << " prediction records, " << bad << " violations\n";
  return bad == 0 ? kOk : kInvalid;
}

int run_eval(const Options& o, const CLI::App* cmd) {
  if (!o.predictions.empty()) {
    require(cmd, {{"--ontology", &o.ontology}});
    return run_validate_predictions(o);
  }
  require(cmd, {{"--ckpt", &o.ckpt}, {"--ontology", &o.ontology}, {"--test", &o.test},
                {"--report", &o.report}});
  auto ont = read_ontology(o.ontology);
  Checkpoint ckpt = load_checkpoint(o.ckpt);
  auto model = restore_model(ckpt, ont);
  Corpus test_c = read_corpus(o.test, ont.get());
  MetricReport rep = evaluate(*model, test_c, o.gold_frames);
  write_file_atomic(o.report, report_to_json(rep));
  std::cout << format_report_table(rep);
  return kOk;
}

int run_parse(const Options& o) {
  auto ont = read_ontology(o.ontology);
  Checkpoint ckpt = load_checkpoint(o.ckpt);
  auto model = restore_model(ckpt, ont);
  Corpus input = read_corpus(o.input, ont.get());
  model->cache_node_representations();
  std::string out;
  for (const auto& inst : input.instances) {
    out += serialize_parse_result(inst, decode_structure(*model, inst), model->fkg());
    out += '\n';
  }
  write_file_atomic(o.output, out);
  std::cout << "parsed " << input.size() << " instances into " << o.output << "\n";
  return kOk;
}

int run_split(const Options& o) {
  std::optional<int> k;
  if (o.k != "full") {
    try {
      std::size_t used = 0;
      k = std::stoi(o.k, &used);
      if (used != o.k.size()) throw std::invalid_argument(o.k);
    } catch (const std::exception&) {
      throw UsageError("--k must be a non-negative integer or 'full'");
    }
    if (*k < 0) throw std::invalid_argument("K must be >= 0");
  }
  Corpus c = read_corpus(o.corpus, nullptr);
  std::set<std::string> lemmas(o.held_lemmas.begin(), o.held_lemmas.end());
  std::set<std::string> frames(o.held_frames.begin(), o.held_frames.end());
  FewshotSplit split = make_fewshot_split(c, lemmas, frames, k, o.seed.value_or(1), o.dev_fraction);
  std::filesystem::create_directories(o.out);
  const std::filesystem::path dir(o.out);
  save_corpus(dir / "train.jsonl", split.train);
  save_corpus(dir / "dev.jsonl", split.dev);
  save_corpus(dir / "test.jsonl", split.test);
  std::cout << "train " << split.train.size() << ", dev " << split.dev.size() << ", test "
            << split.test.size() << "\n";
  return kOk;
}

int run_inspect(const Options& o) {
  auto ont = read_ontology(o.ontology);
  FrameKnowledgeGraph g = build_fkg(*ont);
  std::printf("frames       %d\n", g.frame_count);
  std::printf("fes          %d\n", g.fe_count);
  std::printf("node_count   %d\n", g.node_count);
  std::printf("dummy_index  %d\n", g.dummy_index);
  std::printf("name_groups  %zu\n", g.name_groups.size());
  for (int r = 0; r < kFkgRelationCount; ++r) {
    std::printf("edges %-12s %zu\n", relation_name(static_cast<FkgRelation>(r)),
                g.edges[static_cast<std::size_t>(r)].size());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-graph frame semantic parser"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a toy ontology and corpora");
  gen->add_option("--spec", o.spec, "Synthetic spec file")->required();
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--seed", o.seed, "Override the spec seed");

  auto* tr = app.add_subcommand("train", "Train a parser");
  tr->add_option("--config", o.config, "Training config file")->required();
  tr->add_option("--ontology", o.ontology, "Ontology file")->required();
  tr->add_option("--train", o.train, "Training corpus")->required();
  tr->add_option("--dev", o.dev, "Development corpus")->required();
  tr->add_option("--pretrain", o.pretrain, "Optional pretraining corpus");
  tr->add_option("--out", o.out, "Checkpoint path")->required();
  tr->add_option("--seed", o.seed, "Override the config seed");
  tr->add_option("--log", o.log, "Training log (default <out>.log.jsonl)");

  auto* ev = app.add_subcommand("eval", "Score a checkpoint, or validate parse output");
  ev->add_option("--ckpt", o.ckpt, "Checkpoint");
  ev->add_option("--ontology", o.ontology, "Ontology file");
  ev->add_option("--test", o.test, "Annotated corpus");
  ev->add_flag("--gold-frames", o.gold_frames, "Decode every target with its gold frame");
  ev->add_option("--report", o.report, "Metric report output");
  ev->add_option("--predictions", o.predictions,
                 "Validate a parse output file instead of scoring");

  auto* pa = app.add_subcommand("parse", "Parse targets in a corpus file");
  pa->add_option("--ckpt", o.ckpt, "Checkpoint")->required();
  pa->add_option("--ontology", o.ontology, "Ontology file")->required();
  pa->add_option("--input", o.input, "Input corpus")->required();
  pa->add_option("--output", o.output, "Parse output")->required();

  auto* sp = app.add_subcommand("fewshot-split", "Build a zero/few-shot transfer split");
  sp->add_option("--corpus", o.corpus, "Annotated corpus")->required();
  sp->add_option("--held-lemmas", o.held_lemmas, "Held target lemmas")->required();
  sp->add_option("--held-frames", o.held_frames, "Held frames")->required();
  sp->add_option("--k", o.k, "Instances kept per held frame, or 'full'")->required();
  sp->add_option("--seed", o.seed, "Sampling seed");
  sp->add_option("--dev-fraction", o.dev_fraction, "Share of regular instances sent to dev");
  sp->add_option("--out", o.out, "Output directory")->required();

  auto* in = app.add_subcommand("inspect-fkg", "Print FKG node and edge counts");
  in->add_option("--ontology", o.ontology, "Ontology file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (gen->parsed()) return run_gen(o);
    if (tr->parsed()) return run_train(o);
    if (ev->parsed()) return run_eval(o, ev);
    if (pa->parsed()) return run_parse(o);
    if (sp->parsed()) return run_split(o);
    if (in->parsed()) return run_inspect(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}
