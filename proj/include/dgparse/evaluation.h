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

#ifndef DGPARSE_EVALUATION_H_
#define DGPARSE_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dgparse/corpus.h"
#include "dgparse/model.h"

namespace dgparse {

struct ArgumentItem {
  Span span;
  int role = -1;  // FKG node index

  auto operator<=>(const ArgumentItem&) const = default;
};

// Gold and predicted structure for one target.
struct TargetPrediction {
  int gold_frame = -1;
  int predicted_frame = -1;
  std::vector<ArgumentItem> gold;
  std::vector<ArgumentItem> predicted;
};

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  long matched = 0;
  long predicted = 0;
  long gold = 0;

  bool operator==(const Prf&) const = default;
};

// Multiset intersection size under exact (start, end, role) match.
long match_arguments(std::span<const ArgumentItem> predicted,
                     std::span<const ArgumentItem> gold);

Prf make_prf(long matched, long predicted, long gold);

// Micro-averaged over argument items. Meant for predictions decoded with the
// gold frame forced.
Prf arg_prf(std::span<const TargetPrediction> preds);

// One frame item plus one item per argument for every target.
Prf full_structure_prf(std::span<const TargetPrediction> preds);

double frame_accuracy(std::span<const TargetPrediction> preds);

struct MetricReport {
  long targets = 0;
  double frame_accuracy = 0;
  long frames_correct = 0;
  Prf arg;
  Prf full;

  bool operator==(const MetricReport&) const = default;
};

std::string report_to_json(const MetricReport& r);
MetricReport report_from_json(const std::string& text);
std::string format_report_table(const MetricReport& r);

// Gold structure of an annotated instance in FKG node indices.
TargetPrediction gold_structure(const SentenceInstance& inst,
                                const FrameKnowledgeGraph& fkg);

// Decodes every instance twice: once freely (frame accuracy and full
// structure) and once with the gold frame forced (argument scores). With
// gold_frames_only the free pass is skipped and full scores use the forced
// decode.
MetricReport evaluate(Model& model, const Corpus& corpus, bool gold_frames_only = false);

struct FewshotSplit {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// K < 0 is an error; nullopt keeps every eligible held-frame instance.
FewshotSplit make_fewshot_split(const Corpus& corpus,
                                const std::set<std::string>& held_lemmas,
                                const std::set<std::string>& held_frames,
                                std::optional<int> k, std::uint64_t seed,
                                double dev_fraction = 0.1);

}  // namespace dgparse

#endif  // DGPARSE_EVALUATION_H_
