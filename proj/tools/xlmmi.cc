// tools/xlmmi.cc

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

// Command-line front end: one subcommand per pipeline stage.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xlmmi/config.h"
#include "xlmmi/decode.h"
#include "xlmmi/error.h"
#include "xlmmi/graph-compiler.h"
#include "xlmmi/lfmmi.h"
#include "xlmmi/phone-inventory.h"
#include "xlmmi/phone-lm.h"
#include "xlmmi/synthetic-task.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/trainer.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {
namespace {

// Data errors are reported with the file they came from.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename F>
auto FromFile(const std::string &path, F &&parse) -> decltype(parse(std::string_view())) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error &e) {
    throw FileError(e.what());
  }
  try {
    return parse(std::string_view(text));
  } catch (const Error &e) {
    throw FileError(path + ": " + e.what());
  }
}

template <typename F>
auto InFile(const std::string &path, F &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    throw FileError(path + ": " + e.what());
  }
}

void WriteOutput(const std::string &path, const std::string &contents) {
  if (path == "-") {
    std::cout << contents;
    return;
  }
  InFile(path, [&] { WriteFileAtomic(path, contents); });
}

PhoneInventory LoadVocab(const std::string &path) {
  return FromFile(path, [](std::string_view t) { return LoadInventory(t); });
}

// Vocabulary listed by the 1-gram section of an ARPA file, in file order.
// WriteArpa lists unigrams in phone-id order, so ids are reproduced.
PhoneInventory VocabFromArpa(std::string_view text) {
  PhoneInventory vocab;
  bool in_unigrams = false;
  for (std::string_view line : SplitLines(text)) {
    line = StripWhitespace(line);
    if (line.empty()) continue;
    if (line.front() == '\\') {
      in_unigrams = line == "\\1-grams:";
      if (line == "\\0-grams:")
        Fail(ErrorKind::kParse, "an order-0 LM does not list its vocabulary; pass --vocab");
      continue;
    }
    if (!in_unigrams) continue;
    auto fields = SplitWhitespace(line);
    if (fields.size() < 2) Fail(ErrorKind::kMalformedLine, "bad 1-gram line '" + std::string(line) + "'");
    std::string symbol(fields[1]);
    if (symbol != "<s>" && symbol != "</s>") vocab.Add(symbol);
  }
  if (vocab.Size() == 0) Fail(ErrorKind::kParse, "no 1-grams found");
  return vocab;
}

NGramModel LoadArpa(const std::string &lm_path, const std::string &vocab_path) {
  return FromFile(lm_path, [&](std::string_view text) {
    PhoneInventory vocab = vocab_path.empty() ? VocabFromArpa(text) : LoadVocab(vocab_path);
    return ReadArpa(text, vocab);
  });
}

WeightedGraph LoadGraph(const std::string &path) {
  return FromFile(path, [](std::string_view t) { return ReadGraph(t); });
}

Matrix LoadEmat(const std::string &path) {
  return FromFile(path, [](std::string_view t) { return ReadEmat(t); });
}

KeyValueConfig LoadConfig(const std::string &path) {
  return FromFile(path, [](std::string_view t) { return KeyValueConfig::Parse(t); });
}

SyntheticTask LoadTaskDir(const std::string &dir) {
  return InFile(dir, [&] { return LoadTask(dir); });
}

AcousticModel LoadModel(const std::string &path) {
  return FromFile(path, [](std::string_view t) { return ReadModel(t); });
}

// Each line `id<TAB>phone phone ...`.
std::vector<std::pair<std::string, PhoneSeq>> LoadPhoneTable(const std::string &path,
                                                             const PhoneInventory &vocab) {
  return FromFile(path, [&](std::string_view text) {
    std::vector<std::pair<std::string, PhoneSeq>> rows;
    int line_no = 0;
    for (std::string_view line : SplitLines(text)) {
      line_no++;
      if (StripWhitespace(line).empty()) continue;
      auto tab = line.find('\t');
      std::string id(StripWhitespace(line.substr(0, tab)));
      std::string_view phones = tab == std::string_view::npos ? "" : line.substr(tab + 1);
      try {
        rows.emplace_back(id, ParsePhones(phones, vocab));
      } catch (const Error &e) {
        Fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return rows;
  });
}

struct Options {
  // estimate-lm / lm graphs
  int order = 2;
  std::string manifest, vocab, lm, out;
  int states_per_phone = 1;
  bool decode_graph = false;
  // build-num
  std::string lexicon, words;
  // loss / decode
  std::string num, den, graph;
  std::vector<std::string> emats;
  // experiments
  std::string config, task, pretrained, metrics, model, model_out, scenario, split, head;
  std::string ref, hyp;
  int64_t seed = -1;
  bool has_seed() const { return seed >= 0; }
};

int EstimateLm(const Options &o) {
  PhoneInventory vocab = LoadVocab(o.vocab);
  std::vector<ManifestEntry> entries =
      FromFile(o.manifest, [](std::string_view t) { return LoadManifest(t); });
  const std::filesystem::path base = std::filesystem::path(o.manifest).parent_path();
  std::vector<WeightedCorpus> corpora;
  for (const ManifestEntry &e : entries) {
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = base / p;
    WeightedCorpus c;
    c.weight = e.weight;
    c.utterances = FromFile(p.string(), [&](std::string_view t) { return LoadCorpus(t, vocab); });
    corpora.push_back(std::move(c));
  }
  NGramModel model = InFile(o.manifest, [&] { return EstimateNGram(corpora, o.order, vocab); });
  WriteOutput(o.out, WriteArpa(model));
  return 0;
}

int LmToFsaCmd(const Options &o) {
  NGramModel model = LoadArpa(o.lm, o.vocab);
  WriteOutput(o.out, WriteGraph(InFile(o.lm, [&] { return LmToFsa(model); })));
  return 0;
}

int BuildDen(const Options &o) {
  NGramModel model = LoadArpa(o.lm, o.vocab);
  WeightedGraph g = InFile(o.lm, [&] {
    WeightedGraph fsa = LmToFsa(model);
    HmmTopology topo = MakeTopology(o.states_per_phone, true, model.VocabSize());
    return o.decode_graph ? BuildDecodeGraph(fsa, topo) : BuildDenominator(fsa, topo);
  });
  WriteOutput(o.out, WriteGraph(g));
  return 0;
}

int BuildNum(const Options &o) {
  PhoneInventory vocab = LoadVocab(o.vocab);
  Lexicon lex = FromFile(o.lexicon, [&](std::string_view t) { return LoadLexicon(t, vocab); });
  std::vector<std::string> words;
  for (auto w : SplitWhitespace(o.words)) words.emplace_back(w);
  WeightedGraph g = InFile(o.lexicon, [&] {
    HmmTopology topo = MakeTopology(o.states_per_phone, true, vocab.Size());
    return BuildNumerator(TranscriptToPhoneAlternatives(words, lex), topo);
  });
  WriteOutput(o.out, WriteGraph(g));
  return 0;
}

int Loss(const Options &o) {
  WeightedGraph num = LoadGraph(o.num), den = LoadGraph(o.den);
  Matrix e = LoadEmat(o.emats.at(0));
  LossResult r = InFile(o.emats.at(0), [&] { return LfmmiLoss(num, den, e); });
  std::cout << FormatDouble(r.loss) << " " << FormatDouble(r.num_logprob) << " "
            << FormatDouble(r.den_logprob) << "\n";
  return 0;
}

int GenerateTaskCmd(const Options &o) {
  KeyValueConfig c = LoadConfig(o.config);
  SyntheticTaskSpec spec = InFile(o.config, [&] { return TaskSpecFromConfig(c); });
  if (o.has_seed()) spec.seed = static_cast<uint64_t>(o.seed);
  InFile(o.config, [&] { c.CheckAllUsed({"task"}); });
  SyntheticTask task = InFile(o.config, [&] { return GenerateTask(spec); });
  InFile(o.out, [&] { SaveTask(task, o.out); });
  return 0;
}

int Pretrain(const Options &o) {
  KeyValueConfig c = LoadConfig(o.config);
  ModelConfig mc;
  PretrainConfig pc;
  InFile(o.config, [&] {
    mc = ModelConfigFromConfig(c);
    pc = PretrainConfigFromConfig(c);
    c.CheckAllUsed({"model", "pretrain"});
  });
  if (o.has_seed()) pc.seed = static_cast<uint64_t>(o.seed);
  SyntheticTask task = LoadTaskDir(o.task);
  PretrainResult r = InFile(o.task, [&] { return PretrainMultilingual(task, mc, pc); });
  WriteOutput(o.out, WriteModel(r.model));
  if (!o.metrics.empty()) {
    std::vector<MetricRow> rows;
    for (size_t i = 0; i < r.loss_history.size(); i++)
      rows.push_back({static_cast<int64_t>(std::min<size_t>((i + 1) * pc.log_every, pc.steps)),
                      "pretrain", "train_loss", FormatDouble(r.loss_history[i])});
    rows.push_back({pc.steps, "pretrain", "skipped", std::to_string(r.skipped)});
    WriteOutput(o.metrics, FormatMetrics(rows));
  }
  return 0;
}

struct FinetuneInputs {
  SyntheticTask task;
  ModelConfig model_config;
  std::optional<AcousticModel> pretrained;
};

FinetuneInputs LoadFinetuneInputs(const Options &o) {
  FinetuneInputs in;
  in.task = LoadTaskDir(o.task);
  if (!o.pretrained.empty()) in.pretrained = LoadModel(o.pretrained);
  return in;
}

int Finetune(const Options &o) {
  KeyValueConfig c = LoadConfig(o.config);
  TrainConfig tc;
  ModelConfig mc;
  InFile(o.config, [&] {
    mc = ModelConfigFromConfig(c);
    tc = TrainConfigFromConfig(c, "finetune");
    if (!o.scenario.empty()) tc.scenario = ParseScenario(o.scenario);
    c.CheckAllUsed({"model", "finetune"});
  });
  if (o.has_seed()) tc.seed = static_cast<uint64_t>(o.seed);
  FinetuneInputs in = LoadFinetuneInputs(o);
  TrainResult r = InFile(o.task, [&] {
    return TrainScenario(in.task, in.pretrained ? &*in.pretrained : nullptr, mc, tc);
  });
  WriteOutput(o.metrics, FormatMetrics(r.metrics));
  if (!o.model_out.empty()) WriteOutput(o.model_out, WriteModel(r.model));
  return 0;
}

int Sweep(const Options &o) {
  KeyValueConfig c = LoadConfig(o.config);
  SweepConfig sc;
  ModelConfig mc;
  InFile(o.config, [&] {
    mc = ModelConfigFromConfig(c);
    sc = SweepConfigFromConfig(c);
    if (!o.scenario.empty()) sc.base.scenario = ParseScenario(o.scenario);
    c.CheckAllUsed({"model", "finetune", "sweep"});
  });
  if (o.has_seed()) sc.base.seed = static_cast<uint64_t>(o.seed);
  FinetuneInputs in = LoadFinetuneInputs(o);
  SweepResult r = InFile(o.task, [&] {
    return SweepDenominator(in.task, in.pretrained ? &*in.pretrained : nullptr, mc, sc);
  });
  WriteOutput(o.metrics, FormatMetrics(r.metrics));
  for (const SweepCell &cell : r.cells)
    if (cell.failed)
      std::cerr << "warning: n=" << cell.order << " alpha=" << FormatDouble(cell.alpha)
                << " failed: " << cell.error << "\n";
  return 0;
}

int Experiment(const Options &o) {
  KeyValueConfig c = LoadConfig(o.config);
  ModelConfig mc;
  PretrainConfig pc;
  ExperimentConfig ec;
  InFile(o.config, [&] {
    mc = ModelConfigFromConfig(c);
    pc = PretrainConfigFromConfig(c);
    ec = ExperimentConfigFromConfig(c);
    c.CheckAllUsed({"model", "pretrain", "finetune", "experiment"});
  });
  if (o.has_seed()) ec.seeds = {static_cast<uint64_t>(o.seed)};
  SyntheticTask task = LoadTaskDir(o.task);
  ExperimentResult r = InFile(o.task, [&] { return RunExperiment(task, mc, pc, ec); });
  WriteOutput(o.metrics, FormatMetrics(r.metrics));
  return 0;
}

int Decode(const Options &o) {
  WeightedGraph graph = LoadGraph(o.graph);
  PhoneInventory vocab = LoadVocab(o.vocab);
  std::string out;
  auto decode_one = [&](const std::string &id, const Matrix &e, const std::string &source) {
    PhoneSeq phones;
    try {
      phones = Viterbi(graph, e).phones;
    } catch (const Error &err) {
      if (err.kind() != ErrorKind::kNoAcceptingPath) throw FileError(source + ": " + err.what());
    }
    out += id + "\t" + FormatPhones(phones, vocab) + "\n";
  };
  if (!o.model.empty()) {
    AcousticModel model = LoadModel(o.model);
    SyntheticTask task = LoadTaskDir(o.task);
    auto it = task.target.splits.find(o.split);
    if (it == task.target.splits.end())
      throw FileError(o.task + ": no target split '" + o.split + "'");
    for (const Utterance &u : it->second) {
      Matrix e = InFile(o.model, [&] { return model.Forward(u.features, o.head); });
      decode_one(u.id, e, o.task);
    }
  } else {
    for (const std::string &path : o.emats)
      decode_one(std::filesystem::path(path).stem().string(), LoadEmat(path), path);
  }
  WriteOutput(o.out, out);
  return 0;
}

int Score(const Options &o) {
  PhoneInventory vocab = LoadVocab(o.vocab);
  auto refs = LoadPhoneTable(o.ref, vocab);
  auto hyps = LoadPhoneTable(o.hyp, vocab);
  std::map<std::string, PhoneSeq> hyp_by_id(hyps.begin(), hyps.end());
  std::vector<PhoneSeq> ref_seqs, hyp_seqs;
  std::vector<std::string> ids;
  for (const auto &[id, seq] : refs) {
    auto it = hyp_by_id.find(id);
    if (it == hyp_by_id.end()) throw FileError(o.hyp + ": no hypothesis for '" + id + "'");
    ids.push_back(id);
    ref_seqs.push_back(seq);
    hyp_seqs.push_back(it->second);
  }
  if (hyps.size() != refs.size())
    throw FileError(o.hyp + ": " + std::to_string(hyps.size()) + " hypotheses for " +
                    std::to_string(refs.size()) + " references");
  WriteOutput(o.out, WriteScoreReport(ScoreCorpus(ref_seqs, hyp_seqs, ids)));
  return 0;
}

int Run(int argc, char **argv) {
  CLI::App app{"xlmmi: LF-MMI graphs, losses and few-shot transfer experiments"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Cap on worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  Options o;
  std::function<int(const Options &)> action;
  auto sub = [&](const char *name, const char *help, std::function<int(const Options &)> fn) {
    CLI::App *s = app.add_subcommand(name, help);
    s->callback([&action, fn] { action = fn; });
    return s;
  };
  auto seed = [&](CLI::App *s) { s->add_option("--seed", o.seed, "Seed override")->check(CLI::NonNegativeNumber); };

  CLI::App *s = sub("estimate-lm", "Estimate a Witten-Bell phone n-gram LM", EstimateLm);
  s->add_option("--order", o.order, "N-gram order")->required();
  s->add_option("--manifest", o.manifest, "Lines `corpus-path<TAB>weight`")->required();
  s->add_option("--vocab", o.vocab, "Phone inventory")->required();
  s->add_option("--out", o.out, "ARPA output")->required();

  s = sub("lm-to-fsa", "Compile an ARPA LM into a backoff acceptor", LmToFsaCmd);
  s->add_option("--lm", o.lm, "ARPA LM")->required();
  s->add_option("--vocab", o.vocab, "Phone inventory (default: the LM's 1-grams)");
  s->add_option("--out", o.out, "Graph output")->required();

  s = sub("build-den", "Compile a denominator (or decode) graph", BuildDen);
  s->add_option("--lm", o.lm, "ARPA LM")->required();
  s->add_option("--vocab", o.vocab, "Phone inventory (default: the LM's 1-grams)");
  s->add_option("--states-per-phone", o.states_per_phone, "HMM states per phone")->check(CLI::PositiveNumber);
  s->add_flag("--decode", o.decode_graph, "Add phone readouts for decoding");
  s->add_option("--out", o.out, "Graph output")->required();

  s = sub("build-num", "Compile a numerator graph for one transcript", BuildNum);
  s->add_option("--vocab", o.vocab, "Phone inventory")->required();
  s->add_option("--lexicon", o.lexicon, "Lexicon")->required();
  s->add_option("--words", o.words, "Space-separated transcript")->required();
  s->add_option("--states-per-phone", o.states_per_phone, "HMM states per phone")->check(CLI::PositiveNumber);
  s->add_option("--out", o.out, "Graph output")->required();

  s = sub("loss", "Print `loss num_logprob den_logprob` for one utterance", Loss);
  s->add_option("--num", o.num, "Numerator graph")->required();
  s->add_option("--den", o.den, "Denominator graph")->required();
  s->add_option("--emat", o.emats, "Emission matrix")->required()->expected(1);

  s = sub("generate-task", "Sample a synthetic multilingual task", GenerateTaskCmd);
  s->add_option("--config", o.config, "Config with a [task] section")->required();
  s->add_option("--out", o.out, "Output directory")->required();
  seed(s);

  s = sub("pretrain", "Multilingual LF-MMI pretraining", Pretrain);
  s->add_option("--task", o.task, "Task directory")->required();
  s->add_option("--config", o.config, "Config with [model] and [pretrain]")->required();
  s->add_option("--out", o.out, "Model output")->required();
  s->add_option("--metrics", o.metrics, "Loss history output");
  seed(s);

  s = sub("finetune", "Few-shot fine-tuning on the target language", Finetune);
  s->add_option("--task", o.task, "Task directory")->required();
  s->add_option("--config", o.config, "Config with [model] and [finetune]")->required();
  s->add_option("--pretrained", o.pretrained, "Pretrained model (transfer scenarios)");
  s->add_option("--scenario", o.scenario, "Scenario override");
  s->add_option("--metrics", o.metrics, "Metrics output")->required();
  s->add_option("--model-out", o.model_out, "Fine-tuned model output");
  seed(s);

  s = sub("sweep", "Fine-tune over a grid of denominator orders and text weights", Sweep);
  s->add_option("--task", o.task, "Task directory")->required();
  s->add_option("--config", o.config, "Config with [model], [finetune], [sweep]")->required();
  s->add_option("--pretrained", o.pretrained, "Pretrained model (transfer scenarios)");
  s->add_option("--scenario", o.scenario, "Scenario override");
  s->add_option("--metrics", o.metrics, "Metrics output")->required();
  seed(s);

  s = sub("experiment", "Pretrain per seed and fine-tune every scenario and size", Experiment);
  s->add_option("--task", o.task, "Task directory")->required();
  s->add_option("--config", o.config, "Config with [model], [pretrain], [finetune], [experiment]")->required();
  s->add_option("--metrics", o.metrics, "Metrics output")->required();
  seed(s);

  s = sub("decode", "Viterbi phone decoding", Decode);
  s->add_option("--graph", o.graph, "Decode graph")->required();
  s->add_option("--vocab", o.vocab, "Phone inventory of the graph's readouts")->required();
  s->add_option("--emat", o.emats, "Emission matrices; ids are the file stems");
  s->add_option("--model", o.model, "Acoustic model (with --task and --split)");
  s->add_option("--task", o.task, "Task directory");
  s->add_option("--split", o.split, "Target split")->default_val("test");
  s->add_option("--head", o.head, "Model head")->default_val(kUniversalHead);
  s->add_option("--out", o.out, "Hypotheses `id<TAB>phones`")->default_val("-");
  s->callback([&] {
    if (o.model.empty() == o.emats.empty())
      throw CLI::ValidationError("decode", "give either --emat or --model");
    if (!o.model.empty() && o.task.empty())
      throw CLI::ValidationError("decode", "--model needs --task");
    action = Decode;
  });

  s = sub("score", "Phone error rates of hypotheses against references", Score);
  s->add_option("--ref", o.ref, "References `id<TAB>phones`")->required();
  s->add_option("--hyp", o.hyp, "Hypotheses `id<TAB>phones`")->required();
  s->add_option("--vocab", o.vocab, "Phone inventory")->required();
  s->add_option("--out", o.out, "Report output")->default_val("-");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (jobs > 0) omp_set_num_threads(jobs);
  try {
    return action(o);
  } catch (const FileError &e) {
    std::cerr << "xlmmi: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "xlmmi: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace
}  // namespace xlmmi

int main(int argc, char **argv) { return xlmmi::Run(argc, argv); }
