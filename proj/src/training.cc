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

#include "dgparse/training.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "dgparse/logging.h"
#include "json.hpp"

namespace dgparse {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

void validate_config(const TrainConfig& cfg) {
  auto fail = [](const std::string& m) { throw TrainingError("invalid config: " + m); };
  if (cfg.lambda_frame < 0 || cfg.lambda_boundary < 0 || cfg.lambda_role < 0) {
    fail("loss weights must be >= 0");
  }
  if (!(cfg.decay > 0 && cfg.decay <= 1)) fail("decay must be in (0, 1]");
  if (cfg.decay_every < 1) fail("decay_every must be >= 1");
  if (cfg.learning_rate < 0) fail("learning_rate must be >= 0");
  if (cfg.batch_size < 1) fail("batch_size must be >= 1");
  if (cfg.epochs < 0 || cfg.pretrain_epochs < 0) fail("epoch counts must be >= 0");
  if (cfg.patience < 0) fail("patience must be >= 0");
  const ModelConfig& m = cfg.model;
  if (m.word_dim < 1 || m.lemma_dim < 1 || m.pos_dim < 1 || m.indicator_dim < 1 ||
      m.node_dim < 1) {
    fail("dimensions must be >= 1");
  }
  if (m.hidden_dim < 2 || m.hidden_dim % 2 != 0) fail("hidden_dim must be even and >= 2");
  if (m.lstm_layers < 1 || m.ffn_layers < 1 || m.gcn_layers < 1 || m.fkg_layers < 0) {
    fail("layer counts out of range");
  }
}

namespace {

template <typename T>
void read_key(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw TrainingError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw TrainingError("unknown config key '" + where + key + "'");
  }
}

json config_json(const TrainConfig& c) {
  json j;
  j["lambda_frame"] = c.lambda_frame;
  j["lambda_boundary"] = c.lambda_boundary;
  j["lambda_role"] = c.lambda_role;
  j["learning_rate"] = c.learning_rate;
  j["decay"] = c.decay;
  j["decay_every"] = c.decay_every;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["pretrain_epochs"] = c.pretrain_epochs;
  j["seed"] = c.seed;
  j["patience"] = c.patience;
  const ModelConfig& m = c.model;
  j["model"] = {{"word_dim", m.word_dim},     {"lemma_dim", m.lemma_dim},
                {"pos_dim", m.pos_dim},       {"indicator_dim", m.indicator_dim},
                {"hidden_dim", m.hidden_dim}, {"node_dim", m.node_dim},
                {"lstm_layers", m.lstm_layers}, {"gcn_layers", m.gcn_layers},
                {"fkg_layers", m.fkg_layers}, {"ffn_layers", m.ffn_layers}};
  json rels = json::array();
  for (int r = 0; r < kFkgRelationCount; ++r) {
    if (m.enabled_relations[static_cast<std::size_t>(r)]) {
      rels.push_back(relation_name(static_cast<FkgRelation>(r)));
    }
  }
  j["ablation"] = {{"use_fkg", m.use_fkg},
                   {"use_fsg_decoder", m.use_fsg_decoder},
                   {"name_sharing", m.name_sharing},
                   {"fi_use_fkg", m.fi_use_fkg},
                   {"enabled_fkg_relations", rels}};
  return j;
}

TrainConfig config_from(const json& j) {
  if (!j.is_object()) throw TrainingError("config must be an object");
  reject_unknown(j,
                 {"lambda_frame", "lambda_boundary", "lambda_role", "learning_rate", "decay",
                  "decay_every", "batch_size", "epochs", "pretrain_epochs", "seed",
                  "patience", "model", "ablation"},
                 "");
  TrainConfig c;
  read_key(j, "lambda_frame", c.lambda_frame);
  read_key(j, "lambda_boundary", c.lambda_boundary);
  read_key(j, "lambda_role", c.lambda_role);
  read_key(j, "learning_rate", c.learning_rate);
  read_key(j, "decay", c.decay);
  read_key(j, "decay_every", c.decay_every);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "epochs", c.epochs);
  read_key(j, "pretrain_epochs", c.pretrain_epochs);
  read_key(j, "seed", c.seed);
  read_key(j, "patience", c.patience);
  ModelConfig& m = c.model;
  if (j.contains("model")) {
    const json& jm = j["model"];
    if (!jm.is_object()) throw TrainingError("config 'model' must be an object");
    reject_unknown(jm,
                   {"word_dim", "lemma_dim", "pos_dim", "indicator_dim", "hidden_dim",
                    "node_dim", "lstm_layers", "gcn_layers", "fkg_layers", "ffn_layers"},
                   "model.");
    read_key(jm, "word_dim", m.word_dim);
    read_key(jm, "lemma_dim", m.lemma_dim);
    read_key(jm, "pos_dim", m.pos_dim);
    read_key(jm, "indicator_dim", m.indicator_dim);
    read_key(jm, "hidden_dim", m.hidden_dim);
    read_key(jm, "node_dim", m.node_dim);
    read_key(jm, "lstm_layers", m.lstm_layers);
    read_key(jm, "gcn_layers", m.gcn_layers);
    read_key(jm, "fkg_layers", m.fkg_layers);
    read_key(jm, "ffn_layers", m.ffn_layers);
  }
  if (j.contains("ablation")) {
    const json& ja = j["ablation"];
    if (!ja.is_object()) throw TrainingError("config 'ablation' must be an object");
    reject_unknown(ja,
                   {"use_fkg", "use_fsg_decoder", "name_sharing", "fi_use_fkg",
                    "enabled_fkg_relations"},
                   "ablation.");
    read_key(ja, "use_fkg", m.use_fkg);
    read_key(ja, "use_fsg_decoder", m.use_fsg_decoder);
    read_key(ja, "name_sharing", m.name_sharing);
    read_key(ja, "fi_use_fkg", m.fi_use_fkg);
    if (ja.contains("enabled_fkg_relations")) {
      std::vector<std::string> names;
      read_key(ja, "enabled_fkg_relations", names);
      m.enabled_relations = {false, false, false, false};
      for (const auto& name : names) {
        try {
          m.enabled_relations[static_cast<std::size_t>(relation_from_name(name))] = true;
        } catch (const std::exception&) {
          throw TrainingError("unknown FKG relation '" + name + "'");
        }
      }
    }
  }
  validate_config(c);
  return c;
}

}  // namespace

TrainConfig parse_train_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TrainingError(std::string("malformed config: ") + e.what());
  }
  return config_from(j);
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return parse_train_config(read_file(path));
}

std::string serialize_train_config(const TrainConfig& cfg) {
  return config_json(cfg).dump(2) + "\n";
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  return cfg.learning_rate * std::pow(cfg.decay, epoch / cfg.decay_every);
}

// ---------------------------------------------------------------------------
// Loss

namespace {

int masked_argmax(const Mat& logits, const std::vector<bool>& allowed) {
  int best = -1;
  for (int j = 0; j < static_cast<int>(allowed.size()); ++j) {
    if (!allowed[static_cast<std::size_t>(j)]) continue;
    if (best < 0 || logits(0, j) > logits(0, best)) best = j;
  }
  return best;
}

Var negated(const Var& v) { return ad::scale(v, Real(-1)); }

Var total_of(Tape& tape, const std::vector<Var>& terms) {
  if (terms.empty()) return tape.constant(Mat::Zero(1, 1));
  return ad::sum<Real>(terms);
}

}  // namespace

LossTerms compute_loss(Tape& tape, const Var& y, const SentenceInstance& inst,
                       const Model& model, const TrainConfig& cfg) {
  if (!inst.frame || !inst.arguments) {
    throw TrainingError("compute_loss: instance lacks a gold frame or gold arguments");
  }
  const auto& fkg = model.fkg();
  TargetPrediction gold;
  try {
    gold = gold_structure(inst, fkg);
  } catch (const std::invalid_argument& e) {
    throw TrainingError(std::string("compute_loss: ") + e.what());
  }
  for (std::size_t a = 1; a < gold.gold.size(); ++a) {
    if (!(gold.gold[a - 1].span < gold.gold[a].span) ||
        gold.gold[a - 1].span.overlaps(gold.gold[a].span)) {
      throw TrainingError("compute_loss: gold arguments must be sorted and disjoint");
    }
  }

  SentenceContext ctx(model, tape, inst);
  const int n = ctx.length();
  const int k = static_cast<int>(gold.gold.size());

  std::vector<int> all_frames(static_cast<std::size_t>(fkg.frame_count));
  for (int f = 0; f < fkg.frame_count; ++f) all_frames[static_cast<std::size_t>(f)] = f;
  Distribution fd = frame_distribution(model, ctx, y, inst, all_frames);
  LossTerms out;
  out.frame = negated(ad::pick(fd.log_probs, 0, fd.position_of(gold.gold_frame)));

  const auto roles = candidate_roles(fkg, gold.gold_frame);
  const int dummy_pos = static_cast<int>(roles.size()) - 1;
  PartialFsg fsg{inst.target, gold.gold_frame, {}};
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  std::vector<Var> ls, le, lr;

  for (int tau = 0; tau <= k; ++tau) {
    Var g = graph_state(model, ctx, y, fsg);
    Var s_logits = boundary_logits(g, ctx.tokens(), model.start_ffn);
    Var e_logits = boundary_logits(g, ctx.tokens(), model.end_ffn);

    // The span the decoder itself would pick at this step.
    const auto starts = start_positions(selected);
    std::optional<Span> predicted;
    const int ps = masked_argmax(s_logits.value(), starts);
    if (ps >= 0) {
      const int pe = masked_argmax(e_logits.value(), end_positions(selected, ps));
      predicted = Span{ps, pe};
    }

    if (tau < k) {
      const ArgumentItem& a = gold.gold[static_cast<std::size_t>(tau)];
      auto s_allowed = starts;
      s_allowed[static_cast<std::size_t>(a.span.start)] = true;
      ls.push_back(negated(
          ad::pick(ad::masked_log_softmax(s_logits, s_allowed), 0, a.span.start)));
      auto e_allowed = end_positions(selected, a.span.start);
      e_allowed[static_cast<std::size_t>(a.span.end)] = true;
      le.push_back(negated(
          ad::pick(ad::masked_log_softmax(e_logits, e_allowed), 0, a.span.end)));

      Distribution rd = classify_role(g, ctx.span(a.span), y, model.role_ffn, roles);
      lr.push_back(negated(ad::pick(rd.log_probs, 0, rd.position_of(a.role))));

      // Grow the graph from the model's own choices.
      const Span grow = predicted.value_or(a.span);
      Distribution gd = grow == a.span
                            ? rd
                            : classify_role(g, ctx.span(grow), y, model.role_ffn, roles);
      const Mat& lp = gd.log_probs.value();
      int best = 0;
      for (int p = 1; p < dummy_pos; ++p) {
        if (lp(0, p) > lp(0, best)) best = p;
      }
      fsg.arguments.push_back({grow, roles[static_cast<std::size_t>(best)]});
      for (int i = grow.start; i <= grow.end; ++i) selected[static_cast<std::size_t>(i)] = true;
    } else {
      const Span span = predicted.value_or(inst.target);
      Distribution rd = classify_role(g, ctx.span(span), y, model.role_ffn, roles);
      lr.push_back(negated(ad::pick(rd.log_probs, 0, dummy_pos)));
    }
  }

  out.start = total_of(tape, ls);
  out.end = total_of(tape, le);
  out.role = total_of(tape, lr);
  out.total = ad::scale(out.frame, cfg.lambda_frame) +
              ad::scale(out.start + out.end, cfg.lambda_boundary) +
              ad::scale(out.role, cfg.lambda_role);
  return out;
}

LossValues loss_values(const SentenceInstance& inst, const Model& model,
                       const TrainConfig& cfg) {
  Tape tape;
  Var y = model.node_representations(tape);
  LossTerms t = compute_loss(tape, y, inst, model, cfg);
  return {t.total.scalar(), t.frame.scalar(), t.start.scalar(), t.end.scalar(),
          t.role.scalar()};
}

// ---------------------------------------------------------------------------
// Optimization

void Adam::step(Params& params, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (Param* p : params.all()) {
    auto it = moments_.find(p->name);
    if (it == moments_.end()) {
      it = moments_
               .emplace(p->name, std::make_pair(Mat::Zero(p->value.rows(), p->value.cols()),
                                                Mat::Zero(p->value.rows(), p->value.cols())))
               .first;
    }
    Mat& m = it->second.first;
    Mat& v = it->second.second;
    if (p->grad.size() == 0) {
      m *= beta1_;
      v *= beta2_;
    } else {
      m = beta1_ * m + (1.0 - beta1_) * p->grad;
      v = beta2_ * v + (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
    }
    p->value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
  }
}

LossValues training_step(std::span<const SentenceInstance* const> batch, Model& model,
                         const TrainConfig& cfg, Adam& optimizer, double lr) {
  if (batch.empty()) throw TrainingError("training_step: empty batch");
  model.clear_cache();
  model.params().zero_grad();
  Tape tape;
  Var y = model.node_representations(tape);
  std::vector<Var> totals;
  LossValues mean;
  totals.reserve(batch.size());
  for (const SentenceInstance* inst : batch) {
    LossTerms t = compute_loss(tape, y, *inst, model, cfg);
    totals.push_back(t.total);
    mean.frame += t.frame.scalar();
    mean.start += t.start.scalar();
    mean.end += t.end.scalar();
    mean.role += t.role.scalar();
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  Var loss = ad::scale(ad::sum<Real>(totals), inv);
  mean = {loss.scalar(), mean.frame * inv, mean.start * inv, mean.end * inv, mean.role * inv};
  if (!std::isfinite(mean.total)) {
    std::ostringstream msg;
    msg << "non-finite loss " << mean.total << " (frame " << mean.frame << ", start "
        << mean.start << ", end " << mean.end << ", role " << mean.role << "); per instance:";
    for (std::size_t i = 0; i < totals.size(); ++i) msg << " " << totals[i].scalar();
    throw TrainingError(msg.str());
  }
  tape.backward(loss);
  optimizer.step(model.params(), lr);
  return mean;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'D', 'G', 'P', 'C', 'K', 'P', 'T', '\0'};

std::uint32_t checksum(const char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& s, std::size_t limit) : s_(s), limit_(limit) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  void raw(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, s_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (n > limit_ || pos_ > limit_ - n) throw CheckpointError("corrupt checkpoint: truncated");
  }
  const std::string& s_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

json vocab_json(const Vocabulary& v) {
  return std::vector<std::string>(v.items().begin() + 1, v.items().end());
}

Vocabulary vocab_from(const json& j) {
  Vocabulary v;
  for (const auto& s : j) v.add(s.get<std::string>());
  return v;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  json meta;
  meta["config"] = config_json(ckpt.config);
  meta["epoch"] = ckpt.epoch;
  meta["metrics"] = ckpt.metrics ? json::parse(report_to_json(*ckpt.metrics)) : json(nullptr);
  meta["vocab"] = {{"words", vocab_json(ckpt.vocab.words)},
                   {"lemmas", vocab_json(ckpt.vocab.lemmas)},
                   {"pos", vocab_json(ckpt.vocab.pos)}};
  const std::string header = meta.dump();

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, Checkpoint::kFormatVersion);
  put<std::uint64_t>(out, header.size());
  out += header;
  put<std::uint64_t>(out, ckpt.parameters.size());
  for (const auto& [name, value] : ckpt.parameters) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::int64_t>(out, value.rows());
    put<std::int64_t>(out, value.cols());
    out.append(reinterpret_cast<const char*>(value.data()),
               static_cast<std::size_t>(value.size()) * sizeof(Real));
  }
  put<std::uint32_t>(out, checksum(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  if (bytes.size() < sizeof kMagic + sizeof(std::uint32_t) * 2) {
    throw CheckpointError("corrupt checkpoint: truncated");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  if (stored != checksum(bytes.data(), body)) {
    throw CheckpointError("corrupt checkpoint: checksum mismatch");
  }
  Reader r(bytes, body);
  r.bytes(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kFormatVersion) {
    throw CheckpointError("checkpoint format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(Checkpoint::kFormatVersion) + ")");
  }
  Checkpoint ckpt;
  const auto header_len = r.get<std::uint64_t>();
  json meta;
  try {
    meta = json::parse(r.bytes(static_cast<std::size_t>(header_len)));
    ckpt.config = config_from(meta.at("config"));
    ckpt.epoch = meta.at("epoch").get<int>();
    if (!meta.at("metrics").is_null()) ckpt.metrics = report_from_json(meta["metrics"].dump());
    ckpt.vocab.words = vocab_from(meta.at("vocab").at("words"));
    ckpt.vocab.lemmas = vocab_from(meta.at("vocab").at("lemmas"));
    ckpt.vocab.pos = vocab_from(meta.at("vocab").at("pos"));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint32_t>();
    std::string name = r.bytes(len);
    const auto rows = r.get<std::int64_t>();
    const auto cols = r.get<std::int64_t>();
    if (rows < 0 || cols < 0) throw CheckpointError("corrupt checkpoint: negative shape");
    Mat value(rows, cols);
    r.raw(value.data(), static_cast<std::size_t>(rows * cols) * sizeof(Real));
    ckpt.parameters.emplace(std::move(name), std::move(value));
  }
  if (r.pos() != body) throw CheckpointError("corrupt checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw CheckpointError("checkpoint not found: " + path.string());
  }
  return decode_checkpoint(read_file(path));
}

std::unique_ptr<Model> restore_model(const Checkpoint& ckpt,
                                     std::shared_ptr<const FrameOntology> ontology) {
  auto model = std::make_unique<Model>(ckpt.config.model, std::move(ontology), ckpt.vocab,
                                       ckpt.config.seed);
  try {
    model->restore(ckpt.parameters);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint does not fit the ontology: ") + e.what());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Training loop

std::string epoch_record_json(const EpochRecord& r) {
  json j;
  j["stage"] = r.stage;
  j["epoch"] = r.epoch;
  j["lr"] = r.learning_rate;
  j["loss"] = {{"total", r.loss.total},
               {"frame", r.loss.frame},
               {"start", r.loss.start},
               {"end", r.loss.end},
               {"role", r.loss.role}};
  j["dev"] = r.dev ? json::parse(report_to_json(*r.dev)) : json(nullptr);
  j["improved"] = r.improved;
  return j.dump();
}

namespace {

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  out << line << '\n';
}

}  // namespace

Checkpoint train(const Corpus& train_corpus, const Corpus& dev_corpus,
                 std::shared_ptr<const FrameOntology> ontology, const TrainConfig& cfg,
                 const TrainOptions& options) {
  validate_config(cfg);
  if (train_corpus.empty()) throw TrainingError("training corpus is empty");
  if (options.pretrain && options.pretrain->empty()) {
    throw TrainingError("pretraining corpus is empty");
  }

  Vocabularies vocab;
  if (options.pretrain) {
    for (const auto& inst : options.pretrain->instances) vocab.add(inst);
  }
  for (const auto& inst : train_corpus.instances) vocab.add(inst);

  Model model(cfg.model, ontology, vocab, cfg.seed);
  std::mt19937_64 rng(cfg.seed + 0x5bd1e995ULL);
  Adam adam;

  Checkpoint best;
  best.config = cfg;
  best.vocab = vocab;
  double best_f1 = -1;
  auto take_snapshot = [&](int epoch, std::optional<MetricReport> metrics) {
    best.epoch = epoch;
    best.metrics = std::move(metrics);
    best.parameters = model.snapshot();
  };

  bool stop = false;
  auto run_stage = [&](const std::string& stage, const Corpus& data, int epochs, bool select) {
    std::vector<std::size_t> order(data.size());
    int since_best = 0;
    for (int e = 0; e < epochs && !stop; ++e) {
      EpochRecord rec;
      rec.stage = stage;
      rec.epoch = e + 1;
      rec.learning_rate = learning_rate_at(cfg, e);
      rec.model = &model;

      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
      }
      std::vector<const SentenceInstance*> batch;
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(cfg.batch_size)) {
        batch.clear();
        const std::size_t stop_at =
            std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
        for (std::size_t i = start; i < stop_at; ++i) batch.push_back(&data.instances[order[i]]);
        LossValues v = training_step(batch, model, cfg, adam, rec.learning_rate);
        const double w = static_cast<double>(batch.size()) / static_cast<double>(order.size());
        rec.loss.total += v.total * w;
        rec.loss.frame += v.frame * w;
        rec.loss.start += v.start * w;
        rec.loss.end += v.end * w;
        rec.loss.role += v.role * w;
      }

      if (select) {
        if (!dev_corpus.empty()) {
          rec.dev = evaluate(model, dev_corpus);
          rec.improved = rec.dev->full.f1 > best_f1;
        } else {
          rec.improved = true;
        }
        if (rec.improved) {
          if (rec.dev) best_f1 = rec.dev->full.f1;
          take_snapshot(e + 1, rec.dev);
          since_best = 0;
        } else {
          ++since_best;
        }
      }
      log_info(stage + " epoch " + std::to_string(e + 1) + " lr " +
               std::to_string(rec.learning_rate) + " loss " + std::to_string(rec.loss.total) +
               (rec.dev ? " dev full F1 " + std::to_string(rec.dev->full.f1) : ""));
      if (!options.log_path.empty()) append_line(options.log_path, epoch_record_json(rec));
      if (options.on_epoch && !options.on_epoch(rec)) stop = true;
      if (select && cfg.patience > 0 && since_best >= cfg.patience) stop = true;
    }
  };

  if (options.pretrain) run_stage("pretrain", *options.pretrain, cfg.pretrain_epochs, false);
  stop = false;

  std::optional<MetricReport> initial;
  if (!dev_corpus.empty()) {
    initial = evaluate(model, dev_corpus);
    best_f1 = initial->full.f1;
  }
  take_snapshot(0, initial);
  run_stage("train", train_corpus, cfg.epochs, true);
  return best;
}

}  // namespace dgparse
