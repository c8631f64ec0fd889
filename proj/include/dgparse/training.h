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

// Joint loss, the Adam optimizer, the epoch loop with dev selection, and
// checkpoint files.

#ifndef DGPARSE_TRAINING_H_
#define DGPARSE_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "dgparse/corpus.h"
#include "dgparse/evaluation.h"
#include "dgparse/model.h"

namespace dgparse {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double lambda_frame = 0.1;
  double lambda_boundary = 0.3;
  double lambda_role = 0.3;
  double learning_rate = 6e-5;
  double decay = 0.6;
  int decay_every = 30;
  int batch_size = 32;
  int epochs = 100;
  int pretrain_epochs = 30;
  std::uint64_t seed = 1;
  // Stop after this many epochs without a dev improvement; 0 disables.
  int patience = 0;
  ModelConfig model;

  bool operator==(const TrainConfig&) const = default;
};

// Throws TrainingError on invalid values.
void validate_config(const TrainConfig& cfg);
// Keys absent from the document keep their defaults; unknown keys are errors.
TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::filesystem::path& path);
std::string serialize_train_config(const TrainConfig& cfg);

// Learning rate for a zero-based epoch within a stage.
double learning_rate_at(const TrainConfig& cfg, int epoch);

struct LossTerms {
  Var total;
  Var frame;
  Var start;
  Var end;
  Var role;
};

// The weighted joint loss for one annotated instance on `tape`. `node_reprs`
// is the FKG encoding on the same tape.
LossTerms compute_loss(Tape& tape, const Var& node_reprs,
                       const SentenceInstance& inst, const Model& model,
                       const TrainConfig& cfg);

// Convenience overload that encodes the FKG on a private tape.
struct LossValues {
  double total = 0;
  double frame = 0;
  double start = 0;
  double end = 0;
  double role = 0;
};
LossValues loss_values(const SentenceInstance& inst, const Model& model,
                       const TrainConfig& cfg);

class Adam {
 public:
  explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(Params& params, double lr);
  long steps() const { return t_; }

 private:
  double beta1_, beta2_, epsilon_;
  long t_ = 0;
  std::map<std::string, std::pair<Mat, Mat>> moments_;
};

// One update on the mean loss of `batch`. Returns the mean loss terms.
LossValues training_step(std::span<const SentenceInstance* const> batch, Model& model,
                         const TrainConfig& cfg, Adam& optimizer, double lr);

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  TrainConfig config;
  Vocabularies vocab;
  int epoch = 0;
  std::optional<MetricReport> metrics;
  std::map<std::string, Mat> parameters;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

// Model with the checkpoint's configuration, vocabulary and parameters.
std::unique_ptr<Model> restore_model(const Checkpoint& ckpt,
                                     std::shared_ptr<const FrameOntology> ontology);

struct EpochRecord {
  std::string stage;  // "pretrain" or "train"
  int epoch = 0;      // one-based within the stage
  double learning_rate = 0;
  LossValues loss;
  std::optional<MetricReport> dev;
  bool improved = false;
  // The live model; valid only during the callback.
  Model* model = nullptr;
};

// Structured single-line rendering of an epoch for the training log.
std::string epoch_record_json(const EpochRecord& r);

struct TrainOptions {
  const Corpus* pretrain = nullptr;
  // Called after every epoch; returning false stops training.
  std::function<bool(const EpochRecord&)> on_epoch;
  // Appended to after every epoch when non-empty.
  std::filesystem::path log_path;
};

// Runs the optional pretraining stage, then the main schedule, keeping the
// parameters with the best dev full-structure F1 (the last epoch when dev is
// empty).
Checkpoint train(const Corpus& train_corpus, const Corpus& dev_corpus,
                 std::shared_ptr<const FrameOntology> ontology, const TrainConfig& cfg,
                 const TrainOptions& options = {});

}  // namespace dgparse

#endif  // DGPARSE_TRAINING_H_
