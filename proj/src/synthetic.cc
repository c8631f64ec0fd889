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

#include "dgparse/synthetic.h"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace dgparse {

using json = nlohmann::ordered_json;

void validate_spec(const SyntheticSpec& s) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("synthetic spec: " + m); };
  if (s.frame_count < 1) fail("frame_count must be >= 1");
  if (s.fes_min < 1 || s.fes_max < s.fes_min) fail("need 1 <= fes_min <= fes_max");
  if (s.fes_max > 8) fail("fes_max must be <= 8");
  if (s.family_size < 1) fail("family_size must be >= 1");
  if (s.relation_density < 0 || s.relation_density > 1) fail("relation_density must be in [0, 1]");
  if (s.mapping_density < 0 || s.mapping_density > 1) fail("mapping_density must be in [0, 1]");
  if (s.template_count < 1) fail("template_count must be >= 1");
  if (s.lemmas_per_frame < 1) fail("lemmas_per_frame must be >= 1");
  if (s.sentence_min < 1 || s.sentence_max < s.sentence_min) {
    fail("need 1 <= sentence_min <= sentence_max");
  }
  if (s.sentence_max < 2 * s.fes_max + 1) fail("sentence_max too small for the FE count");
  if (s.train_count < 1 || s.dev_count < 1 || s.test_count < 1 || s.pretrain_count < 0) {
    fail("split counts must be >= 1 (pretrain >= 0)");
  }
  if (s.held_family) {
    if (s.frame_count < s.family_size + 1) fail("held_family needs at least two families");
    if (s.held_lemma.empty()) fail("held_lemma must be non-empty");
  }
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed synthetic spec: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("synthetic spec must be an object");
  SyntheticSpec s;
  auto known = serialize_synthetic_spec(s);
  json defaults = json::parse(known);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument("unknown synthetic spec key '" + key + "'");
  }
  auto get = [&j](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<std::decay_t<decltype(out)>>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("synthetic spec key '") + key + "' has the wrong type");
    }
  };
  get("frame_count", s.frame_count);
  get("fes_min", s.fes_min);
  get("fes_max", s.fes_max);
  get("family_size", s.family_size);
  get("relation_density", s.relation_density);
  get("mapping_density", s.mapping_density);
  get("template_count", s.template_count);
  get("sentence_min", s.sentence_min);
  get("sentence_max", s.sentence_max);
  get("lemmas_per_frame", s.lemmas_per_frame);
  get("train_count", s.train_count);
  get("dev_count", s.dev_count);
  get("test_count", s.test_count);
  get("pretrain_count", s.pretrain_count);
  get("held_family", s.held_family);
  get("held_lemma", s.held_lemma);
  get("seed", s.seed);
  validate_spec(s);
  return s;
}

std::string serialize_synthetic_spec(const SyntheticSpec& s) {
  json j;
  j["frame_count"] = s.frame_count;
  j["fes_min"] = s.fes_min;
  j["fes_max"] = s.fes_max;
  j["family_size"] = s.family_size;
  j["relation_density"] = s.relation_density;
  j["mapping_density"] = s.mapping_density;
  j["template_count"] = s.template_count;
  j["sentence_min"] = s.sentence_min;
  j["sentence_max"] = s.sentence_max;
  j["lemmas_per_frame"] = s.lemmas_per_frame;
  j["train_count"] = s.train_count;
  j["dev_count"] = s.dev_count;
  j["test_count"] = s.test_count;
  j["pretrain_count"] = s.pretrain_count;
  j["held_family"] = s.held_family;
  j["held_lemma"] = s.held_lemma;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

namespace {

const char* const kRoleNames[] = {
    "Agent",     "Theme",      "Source",     "Goal",      "Recipient", "Donor",
    "Instrument", "Place",     "Time",       "Manner",    "Purpose",   "Cause",
    "Patient",   "Experiencer", "Stimulus",  "Content",   "Topic",     "Speaker",
    "Addressee", "Message",    "Path",       "Area",      "Degree",    "Means",
    "Result",    "Beneficiary", "Co_participant", "Duration", "Frequency", "Explanation",
    "Protagonist", "Entity",   "Item",       "Medium",    "Circumstances", "Reason"};

// Draws come straight from the engine so output is identical on every
// standard library.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 rng_;
};

class WordMaker {
 public:
  explicit WordMaker(Draw& d) : d_(d) {
    for (const char* w : {"the", "a", "get"}) used_.insert(w);
  }
  std::string make() {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    for (;;) {
      std::string w;
      const int syllables = d_.between(2, 3);
      for (int s = 0; s < syllables; ++s) {
        w += consonants[d_.below(consonants.size())];
        w += vowels[d_.below(vowels.size())];
      }
      if (d_.chance(0.3)) w += consonants[d_.below(consonants.size())];
      if (used_.insert(w).second) return w;
    }
  }
  std::string capitalized() {
    std::string w = make();
    w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  }
  void reserve(const std::string& w) { used_.insert(w); }

 private:
  Draw& d_;
  std::set<std::string> used_;
};

struct SlotPool {
  std::vector<std::string> nouns;
  std::vector<std::string> adjectives;
};

struct Filler {
  std::string word;
  std::string pos;
};

struct Element {
  enum Kind { kFiller, kTarget, kSlot } kind = kFiller;
  int slot = -1;
  bool det = false;
  bool adj = false;
  Filler filler;

  int length() const { return kind == kSlot ? 1 + (det ? 1 : 0) + (adj ? 1 : 0) : 1; }
};

struct FramePlan {
  int family = 0;
  std::vector<std::string> lemmas;
  bool held = false;
  std::vector<std::vector<Element>> templates;
};

std::vector<Element> make_template(Draw& d, int slots, const std::vector<Filler>& fillers,
                                   const SyntheticSpec& spec) {
  std::vector<Element> items;
  items.push_back({Element::kTarget, -1, false, false, {}});
  std::vector<int> included;
  for (int s = 0; s < slots; ++s) {
    if (d.chance(0.75)) included.push_back(s);
  }
  if (included.empty()) included.push_back(static_cast<int>(d.below(static_cast<std::size_t>(slots))));
  for (int s : included) items.push_back({Element::kSlot, s, d.chance(0.5), d.chance(0.4), {}});
  d.shuffle(items);

  // Gaps before, between and after the items hold filler words.
  std::vector<std::vector<Filler>> gaps(items.size() + 1);
  for (auto& gap : gaps) {
    const int count = d.between(0, 2);
    for (int i = 0; i < count; ++i) gap.push_back(fillers[d.below(fillers.size())]);
  }
  auto total = [&] {
    int n = 0;
    for (const auto& it : items) n += it.length();
    for (const auto& g : gaps) n += static_cast<int>(g.size());
    return n;
  };
  while (total() > spec.sentence_max) {
    auto widest = std::max_element(gaps.begin(), gaps.end(),
                                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (!widest->empty()) {
      widest->pop_back();
      continue;
    }
    bool shrunk = false;
    for (auto& it : items) {
      if (it.kind == Element::kSlot && (it.det || it.adj)) {
        (it.adj ? it.adj : it.det) = false;
        shrunk = true;
        break;
      }
    }
    if (!shrunk) break;
  }
  while (total() < spec.sentence_min) gaps.back().push_back(fillers[d.below(fillers.size())]);

  std::vector<Element> out;
  for (std::size_t i = 0; i <= items.size(); ++i) {
    for (const auto& f : gaps[i]) out.push_back({Element::kFiller, -1, false, false, f});
    if (i < items.size()) out.push_back(items[i]);
  }
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);
  Draw d(spec.seed);
  WordMaker words(d);
  words.reserve(spec.held_lemma);

  const int families = (spec.frame_count + spec.family_size - 1) / spec.family_size;
  const int held_family = spec.held_family ? families - 1 : -1;

  std::vector<int> slot_count(static_cast<std::size_t>(families));
  std::vector<std::vector<SlotPool>> pools(static_cast<std::size_t>(families));
  for (int f = 0; f < families; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    if (f == held_family) {
      slot_count[fi] = slot_count[0];
      pools[fi] = pools[0];
      continue;
    }
    slot_count[fi] = d.between(spec.fes_min, spec.fes_max);
    for (int s = 0; s < slot_count[fi]; ++s) {
      SlotPool pool;
      for (int i = 0; i < 6; ++i) pool.nouns.push_back(words.make());
      for (int i = 0; i < 3; ++i) pool.adjectives.push_back(words.make());
      pools[fi].push_back(std::move(pool));
    }
  }

  SyntheticData data;
  FrameOntology& ont = data.ontology;
  ont.relation_kinds = default_relation_kinds();
  std::vector<FramePlan> plans;
  std::vector<int> family_parent(static_cast<std::size_t>(families), -1);
  const std::size_t role_name_count = std::size(kRoleNames);

  for (int i = 0; i < spec.frame_count; ++i) {
    const int fam = i / spec.family_size;
    const auto famu = static_cast<std::size_t>(fam);
    const bool is_parent = family_parent[famu] < 0;
    if (is_parent) family_parent[famu] = i;
    const bool held = fam == held_family;
    const int slots = slot_count[famu];

    Frame frame;
    frame.name = words.capitalized();
    std::vector<std::string> names;
    const Frame* parent = is_parent ? nullptr : &ont.frames[static_cast<std::size_t>(family_parent[famu])];
    for (int s = 0; s < slots; ++s) {
      std::string name;
      if (parent && d.chance(0.7)) name = parent->fes[static_cast<std::size_t>(s)].name;
      while (name.empty() || std::find(names.begin(), names.end(), name) != names.end()) {
        name = held ? words.capitalized() : kRoleNames[d.below(role_name_count)];
      }
      names.push_back(name);
    }
    frame.definition = "A situation in which the " + names.front() + " takes part in a " +
                       frame.name + " event.";
    for (int s = 0; s < slots; ++s) {
      FrameElement fe;
      fe.name = names[static_cast<std::size_t>(s)];
      fe.definition = "The participant filling the " + fe.name + " position";
      if (slots > 1 && (s == 0 || d.chance(0.5))) {
        fe.definition += ", often together with the " +
                         names[static_cast<std::size_t>((s + 1) % slots)];
      }
      fe.definition += ".";
      frame.fes.push_back(std::move(fe));
    }

    auto mapped = [&](const Frame& other, double density, const char* kind = "Inheritance") {
      FrameRelation rel{kind, other.name, {}};
      for (int s = 0; s < slots; ++s) {
        if (d.chance(density)) {
          rel.fe_mappings.emplace_back(names[static_cast<std::size_t>(s)],
                                       other.fes[static_cast<std::size_t>(s)].name);
        }
      }
      return rel;
    };
    if (parent) frame.relations.push_back(mapped(*parent, spec.mapping_density));
    if (held) {
      // Mirror link to the frame at the same position of the first family.
      const int mirror = std::min(i - fam * spec.family_size, spec.family_size - 1);
      const Frame& other = ont.frames[static_cast<std::size_t>(mirror)];
      frame.relations.push_back(mapped(other, 1.0, is_parent ? "Inheritance" : "Perspective_on"));
    }

    FramePlan plan;
    plan.family = fam;
    plan.held = held;
    for (int l = 0; l < spec.lemmas_per_frame; ++l) plan.lemmas.push_back(words.make());
    for (const auto& lemma : plan.lemmas) ont.lexicon[lemma + ".v"].push_back(frame.name);
    if (held) ont.lexicon[spec.held_lemma + ".v"].push_back(frame.name);

    std::vector<Filler> fillers;
    for (int k = 0; k < 3; ++k) fillers.push_back({words.make(), d.chance(0.5) ? "IN" : "RB"});
    for (int t = 0; t < spec.template_count; ++t) {
      plan.templates.push_back(make_template(d, slots, fillers, spec));
    }
    plans.push_back(std::move(plan));
    ont.frames.push_back(std::move(frame));
  }

  for (int a = 0; a < spec.frame_count; ++a) {
    for (int b = a + 1; b < spec.frame_count; ++b) {
      const auto& pa = plans[static_cast<std::size_t>(a)];
      const auto& pb = plans[static_cast<std::size_t>(b)];
      if (pa.family == pb.family || pa.held || pb.held) continue;
      if (d.chance(spec.relation_density)) {
        ont.frames[static_cast<std::size_t>(a)].relations.push_back(
            {"Using", ont.frames[static_cast<std::size_t>(b)].name, {}});
      }
    }
  }
  ont = derive_mentions_from_definitions(std::move(ont));
  validate_ontology(ont);

  for (std::size_t f = 0; f < plans.size(); ++f) {
    if (plans[f].held) data.held_frames.push_back(ont.frames[f].name);
    if (spec.held_family && plans[f].family == 0) data.source_frames.push_back(ont.frames[f].name);
  }
  if (spec.held_family) data.held_lemmas.push_back(spec.held_lemma);

  static const char* const kSuffixes[] = {"", "s", "ed"};
  auto realize = [&](int count, const std::string& provenance) {
    Corpus c;
    c.provenance = provenance;
    for (int i = 0; i < count; ++i) {
      const std::size_t f = d.below(plans.size());
      const FramePlan& plan = plans[f];
      const Frame& frame = ont.frames[f];
      const auto& tmpl = plan.templates[d.below(plan.templates.size())];
      const auto& slot_pools = pools[static_cast<std::size_t>(plan.family)];
      std::string lemma = plan.held && d.chance(0.5) ? spec.held_lemma
                                                     : plan.lemmas[d.below(plan.lemmas.size())];
      SentenceInstance inst;
      std::vector<GoldArgument> args;
      auto push = [&inst](const std::string& tok, const std::string& lem, const char* pos) {
        inst.tokens.push_back(tok);
        inst.lemmas.push_back(lem);
        inst.pos_tags.push_back(pos);
      };
      for (const auto& el : tmpl) {
        const int at = inst.length();
        switch (el.kind) {
          case Element::kFiller:
            push(el.filler.word, el.filler.word, el.filler.pos.c_str());
            break;
          case Element::kTarget:
            push(lemma + kSuffixes[d.below(3)], lemma, "VB");
            inst.target = {at, at};
            break;
          case Element::kSlot: {
            const SlotPool& pool = slot_pools[static_cast<std::size_t>(el.slot)];
            if (el.det) {
              const char* det = d.chance(0.5) ? "the" : "a";
              push(det, det, "DT");
            }
            if (el.adj) {
              const auto& adj = pool.adjectives[d.below(pool.adjectives.size())];
              push(adj, adj, "JJ");
            }
            const auto& noun = pool.nouns[d.below(pool.nouns.size())];
            push(noun, noun, "NN");
            args.push_back({{at, inst.length() - 1},
                            frame.fes[static_cast<std::size_t>(el.slot)].name});
            break;
          }
        }
      }
      inst.dep_heads.resize(inst.tokens.size());
      for (std::size_t t = 0; t < inst.tokens.size(); ++t) {
        inst.dep_heads[t] = static_cast<int>(t) - 1;
      }
      inst.frame = frame.name;
      inst.arguments = std::move(args);
      sort_arguments(inst);
      c.instances.push_back(std::move(inst));
    }
    return c;
  };
  data.train = realize(spec.train_count, "train");
  data.dev = realize(spec.dev_count, "dev");
  data.test = realize(spec.test_count, "test");
  data.pretrain = realize(spec.pretrain_count, "pretrain");
  return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "ontology.json", serialize_ontology(data.ontology));
  save_corpus(dir / "train.jsonl", data.train);
  save_corpus(dir / "dev.jsonl", data.dev);
  save_corpus(dir / "test.jsonl", data.test);
  if (!data.pretrain.empty()) save_corpus(dir / "pretrain.jsonl", data.pretrain);
  json held;
  held["held_lemmas"] = data.held_lemmas;
  held["held_frames"] = data.held_frames;
  held["source_frames"] = data.source_frames;
  write_file_atomic(dir / "held.json", held.dump(2) + "\n");
}

}  // namespace dgparse
