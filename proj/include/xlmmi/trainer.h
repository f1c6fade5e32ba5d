// include/xlmmi/trainer.h

// Copyright 2026  The xlmmi Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef XLMMI_TRAINER_H_
#define XLMMI_TRAINER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xlmmi/acoustic-model.h"
#include "xlmmi/config.h"
#include "xlmmi/graph-compiler.h"
#include "xlmmi/phone-lm.h"
#include "xlmmi/synthetic-task.h"

namespace xlmmi {

inline constexpr char kUniversalHead[] = "universal";
inline constexpr char kMonoHead[] = "mono";

enum class Scenario { kScratchMono, kTransferMono, kTransferMulti, kFrozenTransferMulti };

std::string_view ScenarioName(Scenario s);
// Throws kInvalidSpec.
Scenario ParseScenario(std::string_view name);

struct ModelConfig {
  std::vector<int32_t> hidden = {32};
  int32_t states_per_phone = 1;
};

struct PretrainConfig {
  int32_t steps = 1000;
  int32_t batch_size = 8;
  double step_size = 0.05;
  double clip = 5.0;
  int32_t den_order = 2;
  int32_t log_every = 50;  // loss history granularity, in steps
  uint64_t seed = 1;
};

struct TrainConfig {
  Scenario scenario = Scenario::kTransferMulti;
  std::string label;  // scenario column of the metrics; defaults to the scenario name
  int32_t train_utterances = 20;
  int32_t steps = 200;
  int32_t batch_size = 4;
  double step_size = 0.05;
  double clip = 5.0;
  int32_t den_order = 2;
  double target_weight = 1.0;  // count multiplier for the paired transcripts
  double alpha = 0.0;          // count multiplier for the unpaired text
  int32_t decode_order = -1;   // -1: same as den_order
  double decode_alpha = -1.0;  // -1: same as alpha
  int32_t eval_every = 50;
  uint64_t seed = 1;
};

struct SweepConfig {
  std::vector<int32_t> orders = {0, 1, 2, 3, 4};
  std::vector<double> alphas = {0.0, 0.1, 0.2, 0.5};
  TrainConfig base;
};

struct ExperimentConfig {
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<int32_t> sizes = {20, 500};
  std::vector<Scenario> scenarios = {Scenario::kScratchMono, Scenario::kTransferMono,
                                     Scenario::kTransferMulti};
  TrainConfig base;
};

ModelConfig ModelConfigFromConfig(const KeyValueConfig &c);
PretrainConfig PretrainConfigFromConfig(const KeyValueConfig &c);
// Keys under `section` (e.g. "finetune").
TrainConfig TrainConfigFromConfig(const KeyValueConfig &c, const std::string &section);
SweepConfig SweepConfigFromConfig(const KeyValueConfig &c);
ExperimentConfig ExperimentConfigFromConfig(const KeyValueConfig &c);

struct MetricRow {
  int64_t step = 0;
  std::string scenario;
  std::string metric;
  std::string value;
};

// `step<TAB>scenario<TAB>metric<TAB>value` lines.
std::string FormatMetrics(const std::vector<MetricRow> &rows);

// Backoff acceptor of an n-gram LM restricted to `phones`. Corpus sequences
// and the returned graph's labels both use the ids in `phones`; `names`
// supplies their symbols.
WeightedGraph PhoneSubsetLmFsa(const std::vector<WeightedCorpus> &corpora, int32_t order,
                               const std::vector<PhoneId> &phones, const PhoneInventory &names);

// Forward pass, LF-MMI loss and backward pass for one utterance. Adds the
// parameter gradient of the loss into `grad` (which selects encoder
// training by having encoder entries). Throws kNumeratorPruned.
LossResult UtteranceLossAndGradient(const AcousticModel &model, const std::string &head,
                                    const Matrix &features, const WeightedGraph &num,
                                    const WeightedGraph &den, ModelGradient *grad);

struct PretrainResult {
  AcousticModel model;
  std::vector<double> loss_history;  // mean per-frame loss over each log_every window
  int32_t skipped = 0;
};

// Universal-head LF-MMI training over all training languages, each with a
// denominator estimated from its own transcripts. Throws kDivergedLoss.
PretrainResult PretrainMultilingual(const SyntheticTask &task, const ModelConfig &model_config,
                                    const PretrainConfig &config);

struct TrainResult {
  AcousticModel model;
  std::vector<MetricRow> metrics;
  double initial_test_per = 0.0;  // percent, before any update
  double final_test_per = 0.0;    // percent, at the best development checkpoint
  int32_t best_step = 0;
  int32_t skipped = 0;
  uint64_t encoder_checksum_before = 0;
  uint64_t encoder_checksum_after = 0;
};

// Fine-tunes on `train_utterances` pool utterances of the target language.
// PER is measured on remapped universal phones for every scenario. Throws
// kScenarioMismatch when `pretrained` does not fit the scenario.
TrainResult TrainScenario(const SyntheticTask &task, const AcousticModel *pretrained,
                          const ModelConfig &model_config, const TrainConfig &config);

struct SweepCell {
  int32_t order = 0;
  double alpha = 0.0;
  bool failed = false;
  std::string error;
  double final_test_per = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<MetricRow> metrics;
};

// One TrainScenario run per (order, alpha) cell; failures are recorded per
// cell.
SweepResult SweepDenominator(const SyntheticTask &task, const AcousticModel *pretrained,
                             const ModelConfig &model_config, const SweepConfig &config);

struct ExperimentRun {
  uint64_t seed = 0;
  int32_t size = 0;
  Scenario scenario = Scenario::kScratchMono;
  TrainResult result;
};

struct ExperimentResult {
  std::vector<ExperimentRun> runs;
  std::vector<MetricRow> metrics;
};

// For each seed: pretrain once (pretrain seed mixed with the run seed), then
// run every scenario at every training-set size.
ExperimentResult RunExperiment(const SyntheticTask &task, const ModelConfig &model_config,
                               const PretrainConfig &pretrain, const ExperimentConfig &config);

}  // namespace xlmmi

#endif  // XLMMI_TRAINER_H_
