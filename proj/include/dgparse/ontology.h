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

// Frame ontology (frames, frame elements, relations, lexicon) and the frame
// knowledge graph compiled from it.

#ifndef DGPARSE_ONTOLOGY_H_
#define DGPARSE_ONTOLOGY_H_

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgparse/layers.h"

namespace dgparse {

class OntologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FrameElement {
  std::string name;
  std::string definition;
  // Sibling FE names mentioned by this FE's definition.
  std::vector<std::string> mentions;
  // True when the ontology file supplied the mentions list itself.
  bool mentions_given = false;
};

struct FrameRelation {
  std::string kind;
  std::string other;
  // (FE of this frame, FE of the other frame)
  std::vector<std::pair<std::string, std::string>> fe_mappings;
};

struct Frame {
  std::string name;
  std::string definition;
  std::vector<FrameElement> fes;
  std::vector<FrameRelation> relations;

  int fe_position(const std::string& fe_name) const;
};

struct FrameOntology {
  std::vector<std::string> relation_kinds;
  std::vector<Frame> frames;
  // Lemma key such as "receive.v" -> evoked frame names.
  std::map<std::string, std::vector<std::string>> lexicon;

  int frame_position(const std::string& name) const;
  std::size_t fe_count() const;
};

// Relation kinds declared when the file omits `relation_kinds`.
const std::vector<std::string>& default_relation_kinds();

FrameOntology parse_ontology(const std::string& text);
FrameOntology load_ontology(const std::filesystem::path& path);
std::string serialize_ontology(const FrameOntology& ont);

// Throws OntologyError naming the first offending identifier.
void validate_ontology(const FrameOntology& ont);

// Fills mentions for FEs whose file entry did not supply them, by scanning
// the definition for whole-word, case-sensitive sibling FE names.
FrameOntology derive_mentions_from_definitions(FrameOntology ont);

enum class FkgRelation : int {
  kFrameFe = 0,
  kFrameFrame = 1,
  kIntraFe = 2,
  kInterFe = 3,
};

inline constexpr int kFkgRelationCount = 4;

const char* relation_name(FkgRelation r);
FkgRelation relation_from_name(const std::string& name);

struct FrameKnowledgeGraph {
  int frame_count = 0;
  int fe_count = 0;
  int node_count = 0;  // frames + FEs + dummy
  int dummy_index = 0;
  std::map<std::string, int> frame_index;
  std::map<std::pair<std::string, std::string>, int> fe_index;
  // Per relation kind, undirected edges stored once with first < second.
  std::array<std::vector<std::pair<int, int>>, kFkgRelationCount> edges;
  // FE node indices grouped by identical FE name.
  std::vector<std::vector<int>> name_groups;
  // Owning frame of every FE node, indexed by node - frame_count.
  std::vector<int> fe_frame;
  // Display names of nodes.
  std::vector<std::string> node_names;

  bool is_frame(int node) const { return node >= 0 && node < frame_count; }
  bool is_fe(int node) const {
    return node >= frame_count && node < frame_count + fe_count;
  }
  int frame_of_fe(int node) const {
    return fe_frame[static_cast<std::size_t>(node - frame_count)];
  }

  // Neighbor lists for one relation kind.
  std::vector<std::vector<int>> adjacency(FkgRelation r) const;
  RelationalGraph relational_graph(
      const std::array<bool, kFkgRelationCount>& enabled = {true, true, true,
                                                            true}) const;
};

FrameKnowledgeGraph build_fkg(const FrameOntology& ont);

// Frames evoked by the lemma key; every frame when the key is unknown.
std::vector<int> candidate_frames(const FrameOntology& ont,
                                  const std::string& lemma_key);

// FE nodes of the frame followed by the dummy node.
std::vector<int> candidate_roles(const FrameKnowledgeGraph& fkg,
                                 int frame_index);

}  // namespace dgparse

#endif  // DGPARSE_ONTOLOGY_H_
