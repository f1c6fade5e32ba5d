// src/trainer.cc

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

#include "xlmmi/trainer.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <random>

#include "xlmmi/decode.h"
#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

std::string_view ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kScratchMono: return "scratch-mono";
    case Scenario::kTransferMono: return "transfer-mono";
    case Scenario::kTransferMulti: return "transfer-multi";
    case Scenario::kFrozenTransferMulti: return "frozen-transfer-multi";
  }
  return "?";
}

Scenario ParseScenario(std::string_view name) {
  for (Scenario s : {Scenario::kScratchMono, Scenario::kTransferMono, Scenario::kTransferMulti,
                     Scenario::kFrozenTransferMulti})
    if (ScenarioName(s) == name) return s;
  Fail(ErrorKind::kInvalidSpec, "unknown scenario '" + std::string(name) + "'");
}

ModelConfig ModelConfigFromConfig(const KeyValueConfig &c) {
  ModelConfig m;
  std::vector<int64_t> hidden(m.hidden.begin(), m.hidden.end());
  hidden = c.GetIntList("model.hidden", hidden);
  m.hidden.assign(hidden.begin(), hidden.end());
  m.states_per_phone = c.GetInt("model.states_per_phone", m.states_per_phone);
  return m;
}

PretrainConfig PretrainConfigFromConfig(const KeyValueConfig &c) {
  PretrainConfig p;
  p.steps = c.GetInt("pretrain.steps", p.steps);
  p.batch_size = c.GetInt("pretrain.batch_size", p.batch_size);
  p.step_size = c.GetDouble("pretrain.step_size", p.step_size);
  p.clip = c.GetDouble("pretrain.clip", p.clip);
  p.den_order = c.GetInt("pretrain.den_order", p.den_order);
  p.log_every = c.GetInt("pretrain.log_every", p.log_every);
  p.seed = c.GetUint("pretrain.seed", p.seed);
  return p;
}

TrainConfig TrainConfigFromConfig(const KeyValueConfig &c, const std::string &section) {
  TrainConfig t;
  auto key = [&](const char *k) { return section + "." + k; };
  t.scenario = ParseScenario(c.GetString(key("scenario"), std::string(ScenarioName(t.scenario))));
  t.label = c.GetString(key("label"), t.label);
  t.train_utterances = c.GetInt(key("train_utterances"), t.train_utterances);
  t.steps = c.GetInt(key("steps"), t.steps);
  t.batch_size = c.GetInt(key("batch_size"), t.batch_size);
  t.step_size = c.GetDouble(key("step_size"), t.step_size);
  t.clip = c.GetDouble(key("clip"), t.clip);
  t.den_order = c.GetInt(key("den_order"), t.den_order);
  t.target_weight = c.GetDouble(key("target_weight"), t.target_weight);
  t.alpha = c.GetDouble(key("alpha"), t.alpha);
  t.decode_order = c.GetInt(key("decode_order"), t.decode_order);
  t.decode_alpha = c.GetDouble(key("decode_alpha"), t.decode_alpha);
  t.eval_every = c.GetInt(key("eval_every"), t.eval_every);
  t.seed = c.GetUint(key("seed"), t.seed);
  return t;
}

SweepConfig SweepConfigFromConfig(const KeyValueConfig &c) {
  SweepConfig s;
  s.base = TrainConfigFromConfig(c, "finetune");
  std::vector<int64_t> orders(s.orders.begin(), s.orders.end());
  orders = c.GetIntList("sweep.orders", orders);
  s.orders.assign(orders.begin(), orders.end());
  s.alphas = c.GetDoubleList("sweep.alphas", s.alphas);
  return s;
}

ExperimentConfig ExperimentConfigFromConfig(const KeyValueConfig &c) {
  ExperimentConfig e;
  e.base = TrainConfigFromConfig(c, "finetune");
  std::vector<int64_t> seeds(e.seeds.begin(), e.seeds.end());
  seeds = c.GetIntList("experiment.seeds", seeds);
  e.seeds.assign(seeds.begin(), seeds.end());
  std::vector<int64_t> sizes(e.sizes.begin(), e.sizes.end());
  sizes = c.GetIntList("experiment.sizes", sizes);
  e.sizes.assign(sizes.begin(), sizes.end());
  if (c.Has("experiment.scenarios")) {
    e.scenarios.clear();
    const std::string names = c.GetString("experiment.scenarios", "");
    for (auto name : Split(names, ','))
      e.scenarios.push_back(ParseScenario(StripWhitespace(name)));
  }
  return e;
}

std::string FormatMetrics(const std::vector<MetricRow> &rows) {
  std::string out;
  for (const MetricRow &r : rows)
    out += std::to_string(r.step) + "\t" + r.scenario + "\t" + r.metric + "\t" + r.value + "\n";
  return out;
}

WeightedGraph PhoneSubsetLmFsa(const std::vector<WeightedCorpus> &corpora, int32_t order,
                               const std::vector<PhoneId> &phones, const PhoneInventory &names) {
  PhoneInventory local;
  std::map<PhoneId, PhoneId> to_local;
  for (PhoneId p : phones) to_local[p] = local.Add(names.Symbol(p));
  std::vector<WeightedCorpus> mapped;
  for (const WeightedCorpus &c : corpora) {
    WeightedCorpus m{{}, c.weight};
    for (const PhoneSeq &s : c.utterances) {
      PhoneSeq out;
      for (PhoneId p : s) {
        auto it = to_local.find(p);
        if (it == to_local.end())
          Fail(ErrorKind::kUnknownPhone, "phone " + std::to_string(p) + " outside the LM phone set");
        out.push_back(it->second);
      }
      m.utterances.push_back(std::move(out));
    }
    mapped.push_back(std::move(m));
  }
  WeightedGraph fsa = LmToFsa(EstimateNGram(mapped, order, local));
  for (Arc &arc : fsa.arcs)
    if (arc.label != kEpsilon) arc.label = phones[arc.label - 1];
  return fsa;
}

LossResult UtteranceLossAndGradient(const AcousticModel &model, const std::string &head,
                                    const Matrix &features, const WeightedGraph &num,
                                    const WeightedGraph &den, ModelGradient *grad) {
  ForwardCache cache;
  Matrix emissions = model.Forward(features, head, &cache);
  LossResult r = LfmmiLoss(num, den, emissions);
  model.Backward(head, cache, r.grad, grad);
  return r;
}

namespace {

struct Example {
  const Matrix *features;
  WeightedGraph num;
  int32_t den;  // index into the denominator list
};

struct StepStats {
  double loss = 0.0;  // per frame
  int64_t frames = 0;
  int32_t skipped = 0;
};

// One SGD update on a batch. Utterances are evaluated concurrently and their
// gradients reduced in batch order.
StepStats SgdStep(AcousticModel *model, const std::string &head, bool train_encoder,
                  const std::vector<Example> &examples, const std::vector<WeightedGraph> &dens,
                  const std::vector<int32_t> &batch, double step_size, double clip) {
  const int32_t n = static_cast<int32_t>(batch.size());
  std::vector<ModelGradient> grads(n);
  std::vector<double> losses(n, 0.0);
  std::vector<int64_t> frames(n, 0);
  std::vector<char> pruned(n, 0);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int32_t b = 0; b < n; b++) {
    try {
      const Example &ex = examples[batch[b]];
      grads[b] = model->ZeroGradient(head, train_encoder);
      LossResult r =
          UtteranceLossAndGradient(*model, head, *ex.features, ex.num, dens[ex.den], &grads[b]);
      losses[b] = r.loss;
      frames[b] = ex.features->rows();
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kNumeratorPruned) pruned[b] = 1;
      else errors[b] = std::current_exception();
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);

  StepStats stats;
  ModelGradient total = model->ZeroGradient(head, train_encoder);
  double loss = 0.0;
  for (int32_t b = 0; b < n; b++) {
    if (pruned[b]) {
      stats.skipped++;
      continue;
    }
    total.Add(grads[b]);
    loss += losses[b];
    stats.frames += frames[b];
  }
  if (stats.frames == 0) return stats;
  stats.loss = loss / stats.frames;
  if (!std::isfinite(stats.loss)) Fail(ErrorKind::kDivergedLoss, "non-finite training loss");
  total.Scale(1.0 / stats.frames);
  model->ApplyGradient(head, std::move(total), step_size, clip);
  return stats;
}

// Cycles through shuffled epochs of example indices.
class BatchSchedule {
 public:
  BatchSchedule(int32_t num_examples, int32_t batch_size, uint64_t seed)
      : order_(num_examples), batch_size_(std::max(1, std::min(batch_size, num_examples))),
        rng_(seed) {
    std::iota(order_.begin(), order_.end(), 0);
    pos_ = order_.size();
  }

  std::vector<int32_t> Next() {
    if (pos_ + batch_size_ > order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      pos_ = 0;
    }
    std::vector<int32_t> batch(order_.begin() + pos_, order_.begin() + pos_ + batch_size_);
    pos_ += batch_size_;
    return batch;
  }

 private:
  std::vector<int32_t> order_;
  size_t batch_size_;
  size_t pos_;
  std::mt19937_64 rng_;
};

PhoneAlternatives MappedAlternatives(const std::vector<std::string> &words, const Lexicon &lex,
                                     const std::function<PhoneId(PhoneId)> &map) {
  PhoneAlternatives alts = TranscriptToPhoneAlternatives(words, lex);
  for (auto &position : alts) {
    std::vector<PhoneSeq> mapped;
    for (const PhoneSeq &pron : position) {
      PhoneSeq m;
      for (PhoneId p : pron) m.push_back(map(p));
      if (std::find(mapped.begin(), mapped.end(), m) == mapped.end()) mapped.push_back(m);
    }
    position = std::move(mapped);
  }
  return alts;
}

// Label space the model is trained in for one scenario, and how to get from
// universal phones into it and from its outputs into the evaluation space.
struct PhoneSpace {
  std::string head;
  HmmTopology topo;
  std::vector<PhoneId> lm_phones;  // model-space ids the target LM covers
  PhoneInventory names;            // symbols indexed by model-space id
  std::function<PhoneId(PhoneId)> from_universal;
  std::function<PhoneId(PhoneId)> to_eval;
};

PhoneSpace MakePhoneSpace(const SyntheticTask &task, bool multi, int32_t states_per_phone) {
  PhoneSpace space;
  const std::set<PhoneId> training = task.TrainingPhones();
  const RemapTable remap = task.remap;
  auto remap_one = [training, remap](PhoneId p) { return RemapSequence({p}, remap, training)[0]; };
  if (multi) {
    space.head = kUniversalHead;
    space.topo = MakeTopology(states_per_phone, true, task.universal.Size());
    std::set<PhoneId> lm;
    for (PhoneId p : task.target.phones) lm.insert(remap_one(p));
    space.lm_phones.assign(lm.begin(), lm.end());
    space.names = task.universal;
    space.from_universal = remap_one;
    space.to_eval = [](PhoneId p) { return p; };
  } else {
    space.head = kMonoHead;
    const std::vector<PhoneId> target = task.target.phones;
    space.topo = MakeTopology(states_per_phone, true, static_cast<int32_t>(target.size()));
    for (size_t i = 0; i < target.size(); i++) {
      space.lm_phones.push_back(static_cast<PhoneId>(i + 1));
      space.names.Add(task.universal.Symbol(target[i]));
    }
    space.from_universal = [target](PhoneId p) {
      auto it = std::lower_bound(target.begin(), target.end(), p);
      if (it == target.end() || *it != p)
        Fail(ErrorKind::kUnknownPhone, "phone " + std::to_string(p) + " is not a target phone");
      return static_cast<PhoneId>(it - target.begin() + 1);
    };
    space.to_eval = [target, remap_one](PhoneId p) { return remap_one(target[p - 1]); };
  }
  return space;
}

PhoneSeq MapSeq(const PhoneSeq &s, const std::function<PhoneId(PhoneId)> &f) {
  PhoneSeq out;
  for (PhoneId p : s) out.push_back(f(p));
  return out;
}

// Corpus PER in percent on `utts`, decoding with `decode_graph`.
double EvaluatePer(const AcousticModel &model, const PhoneSpace &space,
                   const WeightedGraph &decode_graph, const SyntheticTask &task,
                   const std::vector<Utterance> &utts) {
  const int32_t n = static_cast<int32_t>(utts.size());
  std::vector<PhoneSeq> refs(n), hyps(n);
  std::vector<std::exception_ptr> errors(n);
  const std::set<PhoneId> training = task.TrainingPhones();
#pragma omp parallel for schedule(dynamic)
  for (int32_t i = 0; i < n; i++) {
    try {
      refs[i] = RemapSequence(utts[i].phones, task.remap, training);
      Matrix e = model.Forward(utts[i].features, space.head);
      try {
        hyps[i] = MapSeq(Viterbi(decode_graph, e).phones, space.to_eval);
      } catch (const Error &err) {
        if (err.kind() != ErrorKind::kNoAcceptingPath) throw;
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);
  auto per = ScoreCorpus(refs, hyps).total.Per();
  if (!per) Fail(ErrorKind::kEmptyTranscript, "evaluation references are empty");
  return 100.0 * *per;
}

std::string Num(double x) { return FormatDouble(x); }

}  // namespace

PretrainResult PretrainMultilingual(const SyntheticTask &task, const ModelConfig &model_config,
                                    const PretrainConfig &config) {
  if (config.steps < 0 || config.batch_size < 1 || config.log_every < 1)
    Fail(ErrorKind::kInvalidParameter, "bad pretraining schedule");
  HmmTopology topo = MakeTopology(model_config.states_per_phone, true, task.universal.Size());
  PretrainResult result;
  result.model = AcousticModel::Create(task.spec.feature_dim, model_config.hidden,
                                       MixSeed(config.seed, 11));
  result.model.ResetHead(kUniversalHead, topo.NumPdfs(), MixSeed(config.seed, 12));

  std::vector<WeightedGraph> dens;
  std::vector<Example> examples;
  auto identity = [](PhoneId p) { return p; };
  for (const LanguageData &lang : task.train_languages) {
    const auto &utts = lang.splits.at("train");
    WeightedCorpus corpus;
    for (const Utterance &u : utts) corpus.utterances.push_back(CanonicalPhones(u.words, lang.lexicon));
    dens.push_back(BuildDenominator(
        PhoneSubsetLmFsa({corpus}, config.den_order, lang.phones, task.universal), topo));
    for (const Utterance &u : utts)
      examples.push_back({&u.features,
                          BuildNumerator(MappedAlternatives(u.words, lang.lexicon, identity), topo),
                          static_cast<int32_t>(dens.size() - 1)});
  }

  BatchSchedule schedule(static_cast<int32_t>(examples.size()), config.batch_size,
                         MixSeed(config.seed, 13));
  double window_loss = 0.0;
  int32_t window_steps = 0;
  for (int32_t step = 0; step < config.steps; step++) {
    StepStats s = SgdStep(&result.model, kUniversalHead, true, examples, dens, schedule.Next(),
                          config.step_size, config.clip);
    result.skipped += s.skipped;
    if (s.frames > 0) {
      window_loss += s.loss;
      window_steps++;
    }
    if ((step + 1) % config.log_every == 0 || step + 1 == config.steps) {
      if (window_steps > 0) result.loss_history.push_back(window_loss / window_steps);
      window_loss = 0.0;
      window_steps = 0;
    }
  }
  return result;
}

TrainResult TrainScenario(const SyntheticTask &task, const AcousticModel *pretrained,
                          const ModelConfig &model_config, const TrainConfig &config) {
  if (config.steps < 0 || config.batch_size < 1 || config.eval_every < 1)
    Fail(ErrorKind::kInvalidParameter, "bad fine-tuning schedule");
  const bool multi = config.scenario == Scenario::kTransferMulti ||
                     config.scenario == Scenario::kFrozenTransferMulti;
  const bool transfer = config.scenario != Scenario::kScratchMono;
  const bool train_encoder = config.scenario != Scenario::kFrozenTransferMulti;
  const std::string label =
      config.label.empty() ? std::string(ScenarioName(config.scenario)) : config.label;
  PhoneSpace space = MakePhoneSpace(task, multi, model_config.states_per_phone);

  TrainResult result;
  if (transfer) {
    if (pretrained == nullptr)
      Fail(ErrorKind::kScenarioMismatch, label + " needs a pretrained model");
    if (pretrained->InputDim() != task.spec.feature_dim)
      Fail(ErrorKind::kScenarioMismatch, "pretrained model input size does not match the task");
    result.model = *pretrained;
    if (multi) {
      if (!result.model.HasHead(kUniversalHead) ||
          result.model.Head(kUniversalHead).OutputDim() != space.topo.NumPdfs())
        Fail(ErrorKind::kScenarioMismatch, "pretrained model has no matching universal head");
    } else {
      result.model.ResetHead(kMonoHead, space.topo.NumPdfs(), MixSeed(config.seed, 2));
    }
  } else {
    if (pretrained != nullptr)
      Fail(ErrorKind::kScenarioMismatch, "scratch-mono does not take a pretrained model");
    result.model = AcousticModel::Create(task.spec.feature_dim, model_config.hidden,
                                         MixSeed(config.seed, 3));
    result.model.ResetHead(kMonoHead, space.topo.NumPdfs(), MixSeed(config.seed, 2));
  }
  AcousticModel &model = result.model;

  const std::vector<Utterance> train =
      SelectFewShot(task.target.splits.at("pool"), config.train_utterances, MixSeed(config.seed, 1));
  const Lexicon &lex = task.target.lexicon;
  WeightedCorpus paired{{}, config.target_weight}, unpaired{{}, config.alpha};
  for (const Utterance &u : train)
    paired.utterances.push_back(MapSeq(CanonicalPhones(u.words, lex), space.from_universal));
  for (const auto &words : task.unpaired_text)
    unpaired.utterances.push_back(MapSeq(CanonicalPhones(words, lex), space.from_universal));
  auto lm_fsa = [&](int32_t order, double alpha) {
    std::vector<WeightedCorpus> corpora = {paired, unpaired};
    corpora[1].weight = alpha;
    return PhoneSubsetLmFsa(corpora, order, space.lm_phones, space.names);
  };
  std::vector<WeightedGraph> dens = {
      BuildDenominator(lm_fsa(config.den_order, config.alpha), space.topo)};
  const WeightedGraph decode_graph = BuildDecodeGraph(
      lm_fsa(config.decode_order < 0 ? config.den_order : config.decode_order,
             config.decode_alpha < 0 ? config.alpha : config.decode_alpha),
      space.topo);

  std::vector<Example> examples;
  for (const Utterance &u : train)
    examples.push_back(
        {&u.features, BuildNumerator(MappedAlternatives(u.words, lex, space.from_universal), space.topo), 0});

  const auto &dev = task.target.splits.at("dev");
  const auto &test = task.target.splits.at("test");
  result.encoder_checksum_before = model.EncoderChecksum();
  auto &rows = result.metrics;
  double best_dev = 0.0;
  double window_loss = 0.0;
  int32_t window_steps = 0;
  auto evaluate = [&](int32_t step) {
    if (window_steps > 0) rows.push_back({step, label, "train_loss", Num(window_loss / window_steps)});
    window_loss = 0.0;
    window_steps = 0;
    double dev_per = EvaluatePer(model, space, decode_graph, task, dev);
    double test_per = EvaluatePer(model, space, decode_graph, task, test);
    rows.push_back({step, label, "dev_per", Num(dev_per)});
    rows.push_back({step, label, "test_per", Num(test_per)});
    if (step == 0) result.initial_test_per = test_per;
    if (step == 0 || dev_per < best_dev) {
      best_dev = dev_per;
      result.best_step = step;
      result.final_test_per = test_per;
    }
  };

  evaluate(0);
  BatchSchedule schedule(static_cast<int32_t>(examples.size()), config.batch_size,
                         MixSeed(config.seed, 4));
  for (int32_t step = 0; step < config.steps && !examples.empty(); step++) {
    StepStats s = SgdStep(&model, space.head, train_encoder, examples, dens, schedule.Next(),
                          config.step_size, config.clip);
    result.skipped += s.skipped;
    if (s.frames > 0) {
      window_loss += s.loss;
      window_steps++;
    }
    if ((step + 1) % config.eval_every == 0 || step + 1 == config.steps) evaluate(step + 1);
  }
  result.encoder_checksum_after = model.EncoderChecksum();
  const int64_t last = config.steps;
  rows.push_back({last, label, "skipped", std::to_string(result.skipped)});
  rows.push_back({last, label, "encoder_checksum_before", std::to_string(result.encoder_checksum_before)});
  rows.push_back({last, label, "encoder_checksum_after", std::to_string(result.encoder_checksum_after)});
  rows.push_back({last, label, "best_step", std::to_string(result.best_step)});
  rows.push_back({last, label, "final_test_per", Num(result.final_test_per)});
  return result;
}

SweepResult SweepDenominator(const SyntheticTask &task, const AcousticModel *pretrained,
                             const ModelConfig &model_config, const SweepConfig &config) {
  SweepResult result;
  for (int32_t order : config.orders)
    for (double alpha : config.alphas) {
      TrainConfig tc = config.base;
      tc.den_order = order;
      tc.alpha = alpha;
      tc.label = std::string(ScenarioName(tc.scenario)) + ":n=" + std::to_string(order) +
                 ":alpha=" + Num(alpha);
      SweepCell cell{order, alpha, false, "", 0.0};
      try {
        TrainResult r = TrainScenario(task, pretrained, model_config, tc);
        cell.final_test_per = r.final_test_per;
        result.metrics.insert(result.metrics.end(), r.metrics.begin(), r.metrics.end());
      } catch (const Error &e) {
        cell.failed = true;
        cell.error = e.what();
        result.metrics.push_back({0, tc.label, "failed", "1"});
      }
      result.cells.push_back(cell);
    }
  return result;
}

ExperimentResult RunExperiment(const SyntheticTask &task, const ModelConfig &model_config,
                               const PretrainConfig &pretrain, const ExperimentConfig &config) {
  ExperimentResult result;
  for (uint64_t seed : config.seeds) {
    PretrainConfig pc = pretrain;
    pc.seed = MixSeed(pretrain.seed, seed);
    PretrainResult pre = PretrainMultilingual(task, model_config, pc);
    for (int32_t size : config.sizes)
      for (Scenario scenario : config.scenarios) {
        TrainConfig tc = config.base;
        tc.scenario = scenario;
        tc.train_utterances = size;
        tc.seed = seed;
        tc.label = std::string(ScenarioName(scenario)) + ":size=" + std::to_string(size) +
                   ":seed=" + std::to_string(seed);
        TrainResult r = TrainScenario(task, scenario == Scenario::kScratchMono ? nullptr : &pre.model,
                                      model_config, tc);
        result.metrics.insert(result.metrics.end(), r.metrics.begin(), r.metrics.end());
        result.runs.push_back({seed, size, scenario, std::move(r)});
      }
  }
  return result;
}

}  // namespace xlmmi
