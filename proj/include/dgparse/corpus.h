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

// Line-delimited corpus files, instance validation, parse-output records and
// small file helpers.

#ifndef DGPARSE_CORPUS_H_
#define DGPARSE_CORPUS_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgparse/decoder.h"
#include "dgparse/ontology.h"
#include "dgparse/sentence.h"

namespace dgparse {

class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Corpus {
  std::vector<SentenceInstance> instances;
  std::string provenance;  // train, dev, test or pretrain

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

struct LoadStats {
  int records = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

// Every violated invariant, worded for humans; empty means valid. With an
// ontology, the gold frame must exist and every gold role must belong to it.
// Gold argument order is not checked here (see sort_arguments).
std::vector<std::string> validate_instance(const SentenceInstance& inst,
                                           const FrameOntology* ont = nullptr);

// Sorts gold arguments by start, then end.
void sort_arguments(SentenceInstance& inst);

SentenceInstance parse_instance(const std::string& line);
std::string serialize_instance(const SentenceInstance& inst);

// Blank lines are ignored. Malformed records and names missing from `ont`
// throw CorpusError with the line number; instances failing the remaining
// invariants are skipped and counted in `stats`.
Corpus parse_corpus(const std::string& text, const FrameOntology* ont = nullptr,
                    LoadStats* stats = nullptr);
Corpus load_corpus(const std::filesystem::path& path,
                   const FrameOntology* ont = nullptr, LoadStats* stats = nullptr);
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

// The input instance with its gold fields replaced by the prediction, plus
// probabilities.
std::string serialize_parse_result(const SentenceInstance& inst,
                                   const ParseResult& result,
                                   const FrameKnowledgeGraph& fkg);

// Checks one parse-output line: known frame, spans inside the sentence and
// pairwise disjoint, roles inside the predicted frame (never the dummy).
std::vector<std::string> validate_prediction_record(const std::string& line,
                                                    const FrameOntology& ont);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dgparse

#endif  // DGPARSE_CORPUS_H_
