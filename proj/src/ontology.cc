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

#include "dgparse/ontology.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dgparse {

using json = nlohmann::ordered_json;

int Frame::fe_position(const std::string& fe_name) const {
  for (std::size_t i = 0; i < fes.size(); ++i) {
    if (fes[i].name == fe_name) return static_cast<int>(i);
  }
  return -1;
}

int FrameOntology::frame_position(const std::string& name) const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t FrameOntology::fe_count() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.fes.size();
  return n;
}

const std::vector<std::string>& default_relation_kinds() {
  static const std::vector<std::string> kinds = {
      "Inheritance", "Perspective_on", "Using",        "Subframe",
      "Precedes",    "Inchoative_of",  "Causative_of", "See_also"};
  return kinds;
}

namespace {

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw OntologyError(where + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::string optional_string(const json& j, const char* key) {
  if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
  return {};
}

const json& optional_array(const json& j, const char* key,
                           const std::string& where) {
  static const json empty = json::array();
  if (!j.contains(key)) return empty;
  if (!j[key].is_array()) {
    throw OntologyError(where + ": field '" + key + "' must be a list");
  }
  return j[key];
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool contains_word(const std::string& text, const std::string& word) {
  if (word.empty()) return false;
  std::size_t pos = text.find(word);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right_ok = end >= text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok) return true;
    pos = text.find(word, pos + 1);
  }
  return false;
}

}  // namespace

FrameOntology parse_ontology(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw OntologyError(std::string("ontology parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw OntologyError("ontology root must be an object");

  FrameOntology ont;
  if (doc.contains("relation_kinds")) {
    for (const auto& k : optional_array(doc, "relation_kinds", "ontology")) {
      if (!k.is_string()) throw OntologyError("relation_kinds must be strings");
      ont.relation_kinds.push_back(k.get<std::string>());
    }
  } else {
    ont.relation_kinds = default_relation_kinds();
  }

  for (const auto& jf : optional_array(doc, "frames", "ontology")) {
    Frame frame;
    frame.name = require_string(jf, "name", "frame");
    const std::string where = "frame " + frame.name;
    frame.definition = optional_string(jf, "definition");
    for (const auto& je : optional_array(jf, "fes", where)) {
      FrameElement fe;
      fe.name = require_string(je, "name", where + " FE");
      fe.definition = optional_string(je, "definition");
      if (je.contains("mentions")) {
        fe.mentions_given = true;
        for (const auto& m :
             optional_array(je, "mentions", where + " FE " + fe.name)) {
          if (!m.is_string()) {
            throw OntologyError(where + " FE " + fe.name +
                                ": mentions must be strings");
          }
          fe.mentions.push_back(m.get<std::string>());
        }
      }
      frame.fes.push_back(std::move(fe));
    }
    for (const auto& jr : optional_array(jf, "relations", where)) {
      FrameRelation rel;
      rel.kind = require_string(jr, "kind", where + " relation");
      rel.other = require_string(jr, "other", where + " relation");
      for (const auto& jm :
           optional_array(jr, "fe_mappings", where + " relation")) {
        if (!jm.is_array() || jm.size() != 2 || !jm[0].is_string() ||
            !jm[1].is_string()) {
          throw OntologyError(where + ": fe_mappings entries must be [own, other]");
        }
        rel.fe_mappings.emplace_back(jm[0].get<std::string>(),
                                     jm[1].get<std::string>());
      }
      frame.relations.push_back(std::move(rel));
    }
    ont.frames.push_back(std::move(frame));
  }

  if (doc.contains("lexicon")) {
    if (!doc["lexicon"].is_object()) {
      throw OntologyError("lexicon must map lemma keys to frame lists");
    }
    for (const auto& [key, frames] : doc["lexicon"].items()) {
      if (!frames.is_array()) {
        throw OntologyError("lexicon entry " + key + " must be a list");
      }
      auto& out = ont.lexicon[key];
      for (const auto& f : frames) {
        if (!f.is_string()) {
          throw OntologyError("lexicon entry " + key + " must list frame names");
        }
        out.push_back(f.get<std::string>());
      }
    }
  }

  validate_ontology(ont);
  return ont;
}

FrameOntology load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OntologyError("cannot open ontology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ontology(buf.str());
}

void validate_ontology(const FrameOntology& ont) {
  std::set<std::string> kinds(ont.relation_kinds.begin(),
                              ont.relation_kinds.end());
  std::map<std::string, const Frame*> by_name;
  for (const auto& f : ont.frames) {
    if (f.name.empty()) throw OntologyError("frame with empty name");
    if (!by_name.emplace(f.name, &f).second) {
      throw OntologyError("duplicate frame name: " + f.name);
    }
    std::set<std::string> fe_names;
    for (const auto& fe : f.fes) {
      if (fe.name.empty()) throw OntologyError("frame " + f.name + ": empty FE name");
      if (!fe_names.insert(fe.name).second) {
        throw OntologyError("duplicate FE name " + fe.name + " in frame " + f.name);
      }
    }
  }
  for (const auto& f : ont.frames) {
    for (const auto& fe : f.fes) {
      for (const auto& m : fe.mentions) {
        if (f.fe_position(m) < 0) {
          throw OntologyError("dangling mention: FE " + f.name + "." + fe.name +
                              " mentions unknown FE " + m);
        }
      }
    }
    for (const auto& rel : f.relations) {
      if (!kinds.count(rel.kind)) {
        throw OntologyError("frame " + f.name + ": undeclared relation kind " +
                            rel.kind);
      }
      auto it = by_name.find(rel.other);
      if (it == by_name.end()) {
        throw OntologyError("dangling relation: frame " + f.name +
                            " relates to unknown frame " + rel.other);
      }
      for (const auto& [own, other] : rel.fe_mappings) {
        if (f.fe_position(own) < 0) {
          throw OntologyError("dangling mapping: frame " + f.name +
                              " has no FE " + own);
        }
        if (it->second->fe_position(other) < 0) {
          throw OntologyError("dangling mapping: frame " + rel.other +
                              " has no FE " + other);
        }
      }
    }
  }
  for (const auto& [key, frames] : ont.lexicon) {
    for (const auto& name : frames) {
      if (!by_name.count(name)) {
        throw OntologyError("dangling lexicon entry: " + key +
                            " evokes unknown frame " + name);
      }
    }
  }
}

std::string serialize_ontology(const FrameOntology& ont) {
  json doc;
  doc["relation_kinds"] = ont.relation_kinds;
  json frames = json::array();
  for (const auto& f : ont.frames) {
    json jf;
    jf["name"] = f.name;
    jf["definition"] = f.definition;
    json fes = json::array();
    for (const auto& fe : f.fes) {
      json je;
      je["name"] = fe.name;
      je["definition"] = fe.definition;
      if (fe.mentions_given) je["mentions"] = fe.mentions;
      fes.push_back(std::move(je));
    }
    jf["fes"] = std::move(fes);
    json rels = json::array();
    for (const auto& r : f.relations) {
      json jr;
      jr["kind"] = r.kind;
      jr["other"] = r.other;
      json maps = json::array();
      for (const auto& [a, b] : r.fe_mappings) maps.push_back({a, b});
      jr["fe_mappings"] = std::move(maps);
      rels.push_back(std::move(jr));
    }
    jf["relations"] = std::move(rels);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);
  json lex = json::object();
  for (const auto& [k, v] : ont.lexicon) lex[k] = v;
  doc["lexicon"] = std::move(lex);
  return doc.dump(1) + "\n";
}

FrameOntology derive_mentions_from_definitions(FrameOntology ont) {
  for (auto& f : ont.frames) {
    for (auto& fe : f.fes) {
      if (fe.mentions_given) continue;
      fe.mentions.clear();
      for (const auto& sibling : f.fes) {
        if (sibling.name == fe.name) continue;
        if (contains_word(fe.definition, sibling.name)) {
          fe.mentions.push_back(sibling.name);
        }
      }
    }
  }
  return ont;
}

const char* relation_name(FkgRelation r) {
  switch (r) {
    case FkgRelation::kFrameFe: return "frame-fe";
    case FkgRelation::kFrameFrame: return "frame-frame";
    case FkgRelation::kIntraFe: return "intra-fe";
    case FkgRelation::kInterFe: return "inter-fe";
  }
  return "unknown";
}

FkgRelation relation_from_name(const std::string& name) {
  for (int r = 0; r < kFkgRelationCount; ++r) {
    if (name == relation_name(static_cast<FkgRelation>(r))) {
      return static_cast<FkgRelation>(r);
    }
  }
  throw std::invalid_argument("unknown FKG relation kind: " + name);
}

std::vector<std::vector<int>> FrameKnowledgeGraph::adjacency(
    FkgRelation r) const {
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(node_count));
  for (const auto& [a, b] : edges[static_cast<std::size_t>(r)]) {
    nbrs[static_cast<std::size_t>(a)].push_back(b);
    nbrs[static_cast<std::size_t>(b)].push_back(a);
  }
  return nbrs;
}

RelationalGraph FrameKnowledgeGraph::relational_graph(
    const std::array<bool, kFkgRelationCount>& enabled) const {
  RelationalGraph g;
  g.node_count = node_count;
  for (int r = 0; r < kFkgRelationCount; ++r) {
    g.relations.push_back(enabled[static_cast<std::size_t>(r)]
                              ? edges[static_cast<std::size_t>(r)]
                              : std::vector<std::pair<int, int>>{});
  }
  return g;
}

FrameKnowledgeGraph build_fkg(const FrameOntology& ont) {
  FrameKnowledgeGraph g;
  g.frame_count = static_cast<int>(ont.frames.size());
  g.fe_count = static_cast<int>(ont.fe_count());
  g.node_count = g.frame_count + g.fe_count + 1;
  g.dummy_index = g.frame_count + g.fe_count;
  g.node_names.resize(static_cast<std::size_t>(g.node_count));

  int next = g.frame_count;
  for (int f = 0; f < g.frame_count; ++f) {
    const Frame& frame = ont.frames[static_cast<std::size_t>(f)];
    g.frame_index[frame.name] = f;
    g.node_names[static_cast<std::size_t>(f)] = frame.name;
    for (const auto& fe : frame.fes) {
      g.fe_index[{frame.name, fe.name}] = next;
      g.fe_frame.push_back(f);
      g.node_names[static_cast<std::size_t>(next)] = frame.name + "." + fe.name;
      ++next;
    }
  }
  g.node_names[static_cast<std::size_t>(g.dummy_index)] = "<dummy>";

  std::array<std::set<std::pair<int, int>>, kFkgRelationCount> sets;
  auto add = [&sets](FkgRelation r, int a, int b) {
    if (a == b) return;
    sets[static_cast<std::size_t>(r)].emplace(std::min(a, b), std::max(a, b));
  };
  for (const auto& frame : ont.frames) {
    const int fi = g.frame_index.at(frame.name);
    for (const auto& fe : frame.fes) {
      const int ei = g.fe_index.at({frame.name, fe.name});
      add(FkgRelation::kFrameFe, fi, ei);
      for (const auto& m : fe.mentions) {
        add(FkgRelation::kIntraFe, ei, g.fe_index.at({frame.name, m}));
      }
    }
    for (const auto& rel : frame.relations) {
      const int oi = g.frame_index.at(rel.other);
      add(FkgRelation::kFrameFrame, fi, oi);
      for (const auto& [own, other] : rel.fe_mappings) {
        add(FkgRelation::kInterFe, g.fe_index.at({frame.name, own}),
            g.fe_index.at({rel.other, other}));
      }
    }
  }
  for (int r = 0; r < kFkgRelationCount; ++r) {
    const auto& s = sets[static_cast<std::size_t>(r)];
    g.edges[static_cast<std::size_t>(r)].assign(s.begin(), s.end());
  }

  std::map<std::string, std::vector<int>> groups;
  for (const auto& [key, idx] : g.fe_index) groups[key.second].push_back(idx);
  for (auto& [name, members] : groups) {
    std::sort(members.begin(), members.end());
    g.name_groups.push_back(std::move(members));
  }
  std::sort(g.name_groups.begin(), g.name_groups.end());
  return g;
}

std::vector<int> candidate_frames(const FrameOntology& ont,
                                  const std::string& lemma_key) {
  std::vector<int> out;
  auto it = ont.lexicon.find(lemma_key);
  if (it != ont.lexicon.end() && !it->second.empty()) {
    std::set<int> idx;
    for (const auto& name : it->second) idx.insert(ont.frame_position(name));
    out.assign(idx.begin(), idx.end());
    return out;
  }
  out.resize(ont.frames.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

std::vector<int> candidate_roles(const FrameKnowledgeGraph& fkg,
                                 int frame_index) {
  if (frame_index < 0 || frame_index >= fkg.frame_count) {
    throw std::out_of_range("frame index " + std::to_string(frame_index) +
                            " outside [0, " + std::to_string(fkg.frame_count) +
                            ")");
  }
  std::vector<int> out;
  for (const auto& [a, b] :
       fkg.edges[static_cast<std::size_t>(FkgRelation::kFrameFe)]) {
    if (a == frame_index) out.push_back(b);
    else if (b == frame_index) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.push_back(fkg.dummy_index);
  return out;
}

}  // namespace dgparse
