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

// Seeded generator for a toy ontology and template-realized annotated
// corpora.
//
// Frames come in families: a parent frame plus children that inherit from it
// with FE mappings. Every FE position of a family draws its argument words
// from its own pool, so roles are recoverable from words plus the frame. When
// held_family is set, the last family is the held one: each of its frames is
// linked, with every FE mapped, to the frame at the same position of the
// first family; it reuses that family's word pools under FE names found
// nowhere else, and all its frames are evoked by the held lemma in addition
// to their own lemmas.

#ifndef DGPARSE_SYNTHETIC_H_
#define DGPARSE_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dgparse/corpus.h"
#include "dgparse/ontology.h"

namespace dgparse {

struct SyntheticSpec {
  int frame_count = 12;
  int fes_min = 3;
  int fes_max = 3;
  int family_size = 3;
  // Probability of a "Using" relation between frames of different families.
  double relation_density = 0.1;
  // Fraction of FE positions mapped along each inheritance relation.
  double mapping_density = 1.0;
  int template_count = 4;  // per frame
  int sentence_min = 5;
  int sentence_max = 14;
  int lemmas_per_frame = 2;
  int train_count = 200;
  int dev_count = 50;
  int test_count = 50;
  int pretrain_count = 0;
  bool held_family = true;
  std::string held_lemma = "get";
  std::uint64_t seed = 7;

  bool operator==(const SyntheticSpec&) const = default;
};

// Throws std::invalid_argument on an unusable spec.
void validate_spec(const SyntheticSpec& spec);
SyntheticSpec parse_synthetic_spec(const std::string& text);
std::string serialize_synthetic_spec(const SyntheticSpec& spec);

struct SyntheticData {
  // Mentions are derived from the FE definitions.
  FrameOntology ontology;
  Corpus train;
  Corpus dev;
  Corpus test;
  Corpus pretrain;
  std::vector<std::string> held_lemmas;
  std::vector<std::string> held_frames;
  // Frames of the family the held family was derived from.
  std::vector<std::string> source_frames;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// ontology.json, train/dev/test(.jsonl), pretrain.jsonl when non-empty, and
// held.json describing the transfer setup.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace dgparse

#endif  // DGPARSE_SYNTHETIC_H_
