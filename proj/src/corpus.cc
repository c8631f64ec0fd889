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

#include "dgparse/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "dgparse/logging.h"
#include "json.hpp"

namespace dgparse {

using json = nlohmann::ordered_json;

namespace {

Span parse_span(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw CorpusError(std::string(what) + " must be a [start, end] pair");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key)) throw CorpusError(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_array()) throw CorpusError(std::string("field '") + key + "' must be a list");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) {
    if (!s.is_string()) {
      throw CorpusError(std::string("field '") + key + "' must hold strings");
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

json span_json(const Span& s) { return json::array({s.start, s.end}); }

json instance_json(const SentenceInstance& inst) {
  json j;
  j["tokens"] = inst.tokens;
  j["lemmas"] = inst.lemmas;
  j["pos_tags"] = inst.pos_tags;
  j["dep_heads"] = inst.dep_heads;
  j["target"] = span_json(inst.target);
  if (!inst.lemma_key.empty()) j["lemma_key"] = inst.lemma_key;
  return j;
}

// Name of an FE node within its frame.
std::string role_name(const FrameKnowledgeGraph& fkg, int node) {
  const std::string& frame = fkg.node_names[static_cast<std::size_t>(fkg.frame_of_fe(node))];
  return fkg.node_names[static_cast<std::size_t>(node)].substr(frame.size() + 1);
}

}  // namespace

std::vector<std::string> validate_instance(const SentenceInstance& inst,
                                           const FrameOntology* ont) {
  std::vector<std::string> v;
  const int n = inst.length();
  if (n == 0) v.push_back("empty sentence");
  if (static_cast<int>(inst.lemmas.size()) != n ||
      static_cast<int>(inst.pos_tags.size()) != n ||
      static_cast<int>(inst.dep_heads.size()) != n) {
    v.push_back("tokens, lemmas, pos_tags and dep_heads differ in length");
  } else if (n > 0) {
    std::string why = tree_violation(inst.dep_heads);
    if (!why.empty()) v.push_back("dep_heads: " + why);
  }
  auto span_ok = [n](const Span& s) { return s.start >= 0 && s.start <= s.end && s.end < n; };
  if (!span_ok(inst.target)) v.push_back("target span out of range");

  const Frame* frame = nullptr;
  if (ont && inst.frame) {
    const int f = ont->frame_position(*inst.frame);
    if (f < 0) {
      v.push_back("unknown frame '" + *inst.frame + "'");
    } else {
      frame = &ont->frames[static_cast<std::size_t>(f)];
    }
  }
  if (inst.arguments) {
    if (!inst.frame) v.push_back("gold arguments without a gold frame");
    const auto& args = *inst.arguments;
    for (std::size_t a = 0; a < args.size(); ++a) {
      if (!span_ok(args[a].span)) {
        v.push_back("argument " + std::to_string(a) + " span out of range");
      }
      for (std::size_t b = a + 1; b < args.size(); ++b) {
        if (args[a].span.overlaps(args[b].span)) {
          v.push_back("arguments " + std::to_string(a) + " and " + std::to_string(b) +
                      " overlap");
        }
      }
      if (frame && frame->fe_position(args[a].role) < 0) {
        v.push_back("role '" + args[a].role + "' not in frame '" + frame->name + "'");
      }
    }
  }
  return v;
}

void sort_arguments(SentenceInstance& inst) {
  if (!inst.arguments) return;
  std::stable_sort(inst.arguments->begin(), inst.arguments->end(),
                   [](const GoldArgument& a, const GoldArgument& b) { return a.span < b.span; });
}

SentenceInstance parse_instance(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw CorpusError(std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw CorpusError("record must be an object");
  SentenceInstance inst;
  inst.tokens = string_list(j, "tokens");
  inst.lemmas = string_list(j, "lemmas");
  inst.pos_tags = string_list(j, "pos_tags");
  if (!j.contains("dep_heads") || !j["dep_heads"].is_array()) {
    throw CorpusError("missing field 'dep_heads'");
  }
  for (const auto& h : j["dep_heads"]) {
    if (!h.is_number_integer()) throw CorpusError("dep_heads must hold integers");
    inst.dep_heads.push_back(h.get<int>());
  }
  if (!j.contains("target")) throw CorpusError("missing field 'target'");
  inst.target = parse_span(j["target"], "target");
  if (j.contains("lemma_key")) {
    if (!j["lemma_key"].is_string()) throw CorpusError("lemma_key must be a string");
    inst.lemma_key = j["lemma_key"].get<std::string>();
  }
  if (j.contains("gold_frame") && !j["gold_frame"].is_null()) {
    if (!j["gold_frame"].is_string()) throw CorpusError("gold_frame must be a string");
    inst.frame = j["gold_frame"].get<std::string>();
  }
  if (j.contains("gold_args") && !j["gold_args"].is_null()) {
    if (!j["gold_args"].is_array()) throw CorpusError("gold_args must be a list");
    std::vector<GoldArgument> args;
    for (const auto& a : j["gold_args"]) {
      if (!a.is_object() || !a.contains("span") || !a.contains("role") ||
          !a["role"].is_string()) {
        throw CorpusError("gold_args entries need 'span' and 'role'");
      }
      args.push_back({parse_span(a["span"], "argument span"), a["role"].get<std::string>()});
    }
    inst.arguments = std::move(args);
  }
  return inst;
}

std::string serialize_instance(const SentenceInstance& inst) {
  json j = instance_json(inst);
  if (inst.frame) j["gold_frame"] = *inst.frame;
  if (inst.arguments) {
    json args = json::array();
    for (const auto& a : *inst.arguments) {
      args.push_back({{"span", span_json(a.span)}, {"role", a.role}});
    }
    j["gold_args"] = std::move(args);
  }
  return j.dump();
}

Corpus parse_corpus(const std::string& text, const FrameOntology* ont,
                    LoadStats* stats) {
  Corpus corpus;
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++st.records;
    SentenceInstance inst;
    try {
      inst = parse_instance(line);
    } catch (const CorpusError& e) {
      throw CorpusError(e.what(), number);
    }
    if (ont) {
      if (inst.frame) {
        const int f = ont->frame_position(*inst.frame);
        if (f < 0) throw CorpusError("unknown frame '" + *inst.frame + "'", number);
        if (inst.arguments) {
          const Frame& frame = ont->frames[static_cast<std::size_t>(f)];
          for (const auto& a : *inst.arguments) {
            if (frame.fe_position(a.role) < 0) {
              throw CorpusError("role '" + a.role + "' not in frame '" + frame.name + "'",
                                number);
            }
          }
        }
      }
    }
    sort_arguments(inst);
    auto violations = validate_instance(inst, ont);
    if (!violations.empty()) {
      ++st.skipped;
      std::string msg = "line " + std::to_string(number) + " skipped: " + violations.front();
      log_warning(msg);
      st.warnings.push_back(std::move(msg));
      continue;
    }
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const FrameOntology* ont,
                   LoadStats* stats) {
  Corpus c = parse_corpus(read_file(path), ont, stats);
  c.provenance = path.stem().string();
  return c;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& inst : corpus.instances) {
    out += serialize_instance(inst);
    out += '\n';
  }
  return out;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file_atomic(path, serialize_corpus(corpus));
}

std::string serialize_parse_result(const SentenceInstance& inst,
                                   const ParseResult& result,
                                   const FrameKnowledgeGraph& fkg) {
  json j = instance_json(inst);
  j["frame"] = fkg.node_names[static_cast<std::size_t>(result.frame)];
  j["frame_prob"] = result.frame_prob;
  json args = json::array();
  for (const auto& a : result.arguments) {
    args.push_back({{"span", span_json(a.span)},
                    {"role", role_name(fkg, a.role)},
                    {"start_prob", a.start_prob},
                    {"end_prob", a.end_prob},
                    {"role_prob", a.role_prob}});
  }
  j["arguments"] = std::move(args);
  return j.dump();
}

std::vector<std::string> validate_prediction_record(const std::string& line,
                                                    const FrameOntology& ont) {
  std::vector<std::string> v;
  SentenceInstance inst;
  json j;
  try {
    inst = parse_instance(line);
    j = json::parse(line);
  } catch (const std::exception& e) {
    return {e.what()};
  }
  if (!j.contains("frame") || !j["frame"].is_string()) return {"missing predicted frame"};
  inst.frame = j["frame"].get<std::string>();
  if (!j.contains("arguments") || !j["arguments"].is_array()) {
    return {"missing predicted arguments"};
  }
  std::vector<GoldArgument> args;
  for (const auto& a : j["arguments"]) {
    try {
      if (!a.contains("span") || !a.contains("role") || !a["role"].is_string()) {
        throw CorpusError("argument entries need 'span' and 'role'");
      }
      args.push_back({parse_span(a["span"], "argument span"), a["role"].get<std::string>()});
    } catch (const std::exception& e) {
      v.push_back(e.what());
    }
  }
  inst.arguments = std::move(args);
  auto more = validate_instance(inst, &ont);
  v.insert(v.end(), more.begin(), more.end());
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace dgparse
