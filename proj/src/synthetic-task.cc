// src/synthetic-task.cc

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

#include "xlmmi/synthetic-task.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

namespace {

const char *const kSymbols[] = {"p", "b", "t", "d", "k", "g", "f", "v", "s", "z",
                                "S", "Z", "x", "h", "m", "n", "N", "l", "r", "j",
                                "w", "a", "e", "i", "o", "u", "@", "E", "O", "I",
                                "U", "y", "2", "9", "{", "A", "V", "ts", "dZ", "tS"};
constexpr int32_t kNumSymbols = sizeof(kSymbols) / sizeof(kSymbols[0]);

std::string PhoneSymbol(int32_t index) {
  if (index < kNumSymbols) return kSymbols[index];
  return "P" + std::to_string(index);
}

const char *const kSplitNames[] = {"train", "pool", "dev", "test", "unpaired"};

struct WordSampler {
  std::vector<std::string> words;
  std::discrete_distribution<int32_t> dist;
};

WordSampler MakeSampler(const std::vector<std::string> &order, double exponent) {
  WordSampler s;
  s.words = order;
  std::vector<double> w(order.size());
  for (size_t i = 0; i < order.size(); i++) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  s.dist = std::discrete_distribution<int32_t>(w.begin(), w.end());
  return s;
}

std::vector<std::string> SampleWords(const SyntheticTaskSpec &spec, WordSampler &sampler,
                                     std::mt19937_64 &rng) {
  std::uniform_int_distribution<int32_t> count(spec.min_words, spec.max_words);
  std::vector<std::string> words(count(rng));
  for (auto &w : words) w = sampler.words[sampler.dist(rng)];
  return words;
}

struct LanguageModelSource {
  const LanguageData *lang;
  std::vector<std::string> word_order;  // Zipf rank order
  Eigen::RowVectorXd channel;
};

Utterance SampleUtterance(const SyntheticTaskSpec &spec, const LanguageModelSource &src,
                          const Matrix &means, uint64_t seed, std::string id) {
  std::mt19937_64 rng(seed);
  WordSampler sampler = MakeSampler(src.word_order, spec.zipf_exponent);
  Utterance utt;
  utt.id = std::move(id);
  utt.words = SampleWords(spec, sampler, rng);
  for (const std::string &w : utt.words) {
    const auto &prons = *src.lang->lexicon.Find(w);
    std::uniform_int_distribution<size_t> pick(0, prons.size() - 1);
    const PhoneSeq &p = prons[pick(rng)];
    utt.phones.insert(utt.phones.end(), p.begin(), p.end());
  }
  std::bernoulli_distribution more(spec.frame_continue);
  std::uniform_int_distribution<int32_t> allophone(0, spec.allophones - 1);
  std::vector<int32_t> frame_rows;  // row of `means` for each frame
  for (PhoneId p : utt.phones) {
    int32_t row = (p - 1) * spec.allophones + (spec.allophones > 1 ? allophone(rng) : 0);
    int32_t n = spec.min_frames;
    while (more(rng)) n++;
    frame_rows.insert(frame_rows.end(), n, row);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = spec.noise * spec.spread;
  utt.features.resize(static_cast<Eigen::Index>(frame_rows.size()), spec.feature_dim);
  for (size_t t = 0; t < frame_rows.size(); t++)
    for (int32_t j = 0; j < spec.feature_dim; j++) {
      double x = means(frame_rows[t], j) + src.channel(j) + scale * normal(rng);
      // Features are stored as float32; round now so saved tasks reload exactly.
      utt.features(static_cast<Eigen::Index>(t), j) = static_cast<float>(x);
    }
  return utt;
}

std::vector<Utterance> SampleSplit(const SyntheticTaskSpec &spec, const LanguageModelSource &src,
                                   const Matrix &means, int32_t lang_index, int32_t split,
                                   int32_t count) {
  std::vector<Utterance> utts(std::max(count, 0));
  const int32_t n = static_cast<int32_t>(utts.size());
#pragma omp parallel for schedule(dynamic)
  for (int32_t i = 0; i < n; i++) {
    uint64_t stream = (static_cast<uint64_t>(lang_index + 1) << 40) |
                      (static_cast<uint64_t>(split + 1) << 32) | static_cast<uint64_t>(i);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", i);
    utts[i] = SampleUtterance(spec, src, means, MixSeed(spec.seed, stream),
                              src.lang->code + "-" + kSplitNames[split] + "-" + buf);
  }
  return utts;
}

Lexicon MakeLexicon(const SyntheticTaskSpec &spec, const std::string &code,
                    const std::vector<PhoneId> &phones, std::mt19937_64 &rng,
                    std::vector<std::string> *order) {
  Lexicon lex;
  std::uniform_int_distribution<int32_t> len(spec.min_word_phones, spec.max_word_phones);
  std::uniform_int_distribution<size_t> phone(0, phones.size() - 1);
  std::bernoulli_distribution variant(spec.variant_prob);
  for (int32_t w = 0; w < spec.lexicon_size; w++) {
    std::string word = code + "_w" + std::to_string(w);
    PhoneSeq pron(len(rng));
    for (PhoneId &p : pron) p = phones[phone(rng)];
    std::vector<PhoneSeq> prons = {pron};
    if (variant(rng)) {
      PhoneSeq alt = pron;
      std::uniform_int_distribution<size_t> pos(0, alt.size() - 1);
      alt[pos(rng)] = phones[phone(rng)];
      if (alt != pron) prons.push_back(alt);
    }
    lex.entries[word] = prons;
    order->push_back(word);
  }
  return lex;
}

std::string Join(const std::vector<std::string> &words) {
  std::string out;
  for (const auto &w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

}  // namespace

uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SyntheticTaskSpec TaskSpecFromConfig(const KeyValueConfig &c) {
  SyntheticTaskSpec s;
  s.universal_phones = c.GetInt("task.universal_phones", s.universal_phones);
  s.feature_dim = c.GetInt("task.feature_dim", s.feature_dim);
  s.mean_scale = c.GetDouble("task.mean_scale", s.mean_scale);
  s.spread = c.GetDouble("task.spread", s.spread);
  s.noise = c.GetDouble("task.noise", s.noise);
  s.channel_scale = c.GetDouble("task.channel_scale", s.channel_scale);
  s.allophones = c.GetInt("task.allophones", s.allophones);
  s.target_only_distance = c.GetDouble("task.target_only_distance", s.target_only_distance);
  s.min_frames = c.GetInt("task.min_frames", s.min_frames);
  s.frame_continue = c.GetDouble("task.frame_continue", s.frame_continue);
  s.min_words = c.GetInt("task.min_words", s.min_words);
  s.max_words = c.GetInt("task.max_words", s.max_words);
  s.min_word_phones = c.GetInt("task.min_word_phones", s.min_word_phones);
  s.max_word_phones = c.GetInt("task.max_word_phones", s.max_word_phones);
  s.lexicon_size = c.GetInt("task.lexicon_size", s.lexicon_size);
  s.variant_prob = c.GetDouble("task.variant_prob", s.variant_prob);
  s.zipf_exponent = c.GetDouble("task.zipf_exponent", s.zipf_exponent);
  s.train_languages = c.GetInt("task.train_languages", s.train_languages);
  s.train_language_phones = c.GetInt("task.train_language_phones", s.train_language_phones);
  s.target_phones = c.GetInt("task.target_phones", s.target_phones);
  s.target_only_phones = c.GetInt("task.target_only_phones", s.target_only_phones);
  s.pretrain_utterances = c.GetInt("task.pretrain_utterances", s.pretrain_utterances);
  s.target_pool = c.GetInt("task.target_pool", s.target_pool);
  s.dev_utterances = c.GetInt("task.dev_utterances", s.dev_utterances);
  s.test_utterances = c.GetInt("task.test_utterances", s.test_utterances);
  s.unpaired_utterances = c.GetInt("task.unpaired_utterances", s.unpaired_utterances);
  s.seed = c.GetUint("task.seed", s.seed);
  return s;
}

std::string TaskSpecToConfig(const SyntheticTaskSpec &s) {
  std::string out = "[task]\n";
  auto put = [&](const char *key, const std::string &value) {
    out += std::string(key) + " = " + value + "\n";
  };
  auto num = [](double x) { return FormatDouble(x); };
  put("universal_phones", std::to_string(s.universal_phones));
  put("feature_dim", std::to_string(s.feature_dim));
  put("mean_scale", num(s.mean_scale));
  put("spread", num(s.spread));
  put("noise", num(s.noise));
  put("channel_scale", num(s.channel_scale));
  put("allophones", std::to_string(s.allophones));
  put("target_only_distance", num(s.target_only_distance));
  put("min_frames", std::to_string(s.min_frames));
  put("frame_continue", num(s.frame_continue));
  put("min_words", std::to_string(s.min_words));
  put("max_words", std::to_string(s.max_words));
  put("min_word_phones", std::to_string(s.min_word_phones));
  put("max_word_phones", std::to_string(s.max_word_phones));
  put("lexicon_size", std::to_string(s.lexicon_size));
  put("variant_prob", num(s.variant_prob));
  put("zipf_exponent", num(s.zipf_exponent));
  put("train_languages", std::to_string(s.train_languages));
  put("train_language_phones", std::to_string(s.train_language_phones));
  put("target_phones", std::to_string(s.target_phones));
  put("target_only_phones", std::to_string(s.target_only_phones));
  put("pretrain_utterances", std::to_string(s.pretrain_utterances));
  put("target_pool", std::to_string(s.target_pool));
  put("dev_utterances", std::to_string(s.dev_utterances));
  put("test_utterances", std::to_string(s.test_utterances));
  put("unpaired_utterances", std::to_string(s.unpaired_utterances));
  put("seed", std::to_string(s.seed));
  return out;
}

void ValidateTaskSpec(const SyntheticTaskSpec &s) {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) Fail(ErrorKind::kInvalidSpec, what);
  };
  require(s.feature_dim >= 1, "feature_dim must be at least 1");
  require(s.lexicon_size >= 1, "lexicon_size must be at least 1");
  require(s.universal_phones >= 2, "universal_phones must be at least 2");
  require(s.mean_scale >= 0 && s.spread >= 0 && s.noise >= 0 && s.channel_scale >= 0 &&
              s.target_only_distance >= 0,
          "scales must be non-negative");
  require(s.allophones >= 1, "allophones must be at least 1");
  require(s.min_frames >= 1, "min_frames must be at least 1");
  require(s.frame_continue >= 0 && s.frame_continue < 1, "frame_continue must be in [0, 1)");
  require(s.min_words >= 1 && s.max_words >= s.min_words, "bad words-per-utterance range");
  require(s.min_word_phones >= 1 && s.max_word_phones >= s.min_word_phones,
          "bad phones-per-word range");
  require(s.variant_prob >= 0 && s.variant_prob <= 1, "variant_prob must be in [0, 1]");
  require(s.train_languages >= 1, "need at least one training language");
  require(s.target_only_phones >= 0 && s.target_only_phones < s.universal_phones,
          "bad target_only_phones");
  require(s.train_language_phones >= 1 &&
              s.train_language_phones <= s.universal_phones - s.target_only_phones,
          "train_language_phones exceeds the phones available to training languages");
  require(s.target_phones > s.target_only_phones, "target needs shared phones");
  require(s.target_phones - s.target_only_phones <= s.train_language_phones,
          "more shared target phones than a training language has");
  require(2 * (s.target_phones - s.target_only_phones) >= s.target_phones,
          "target must share at least half of its phones with the training languages");
  require(s.pretrain_utterances >= 1 && s.target_pool >= 1 && s.dev_utterances >= 1 &&
              s.test_utterances >= 1 && s.unpaired_utterances >= 0,
          "split sizes must be positive");
}

std::set<PhoneId> SyntheticTask::TrainingPhones() const {
  std::set<PhoneId> phones;
  for (const auto &lang : train_languages) phones.insert(lang.phones.begin(), lang.phones.end());
  return phones;
}

SyntheticTask GenerateTask(const SyntheticTaskSpec &spec) {
  ValidateTaskSpec(spec);
  SyntheticTask task;
  task.spec = spec;
  std::mt19937_64 rng(MixSeed(spec.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  const int32_t U = spec.universal_phones, d = spec.feature_dim;

  const int32_t A = spec.allophones;
  Matrix means(U * A, d);
  for (int32_t p = 0; p < U * A; p++)
    for (int32_t j = 0; j < d; j++) means(p, j) = spec.mean_scale * normal(rng);

  std::vector<PhoneId> pool(U - spec.target_only_phones);
  std::iota(pool.begin(), pool.end(), 1);
  std::set<PhoneId> union_phones;
  for (int32_t l = 0; l < spec.train_languages; l++) {
    LanguageData lang;
    lang.code = "L" + std::to_string(l + 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    lang.phones.assign(pool.begin(), pool.begin() + spec.train_language_phones);
    std::sort(lang.phones.begin(), lang.phones.end());
    union_phones.insert(lang.phones.begin(), lang.phones.end());
    task.train_languages.push_back(std::move(lang));
  }

  std::vector<PhoneId> shared(union_phones.begin(), union_phones.end());
  std::shuffle(shared.begin(), shared.end(), rng);
  shared.resize(spec.target_phones - spec.target_only_phones);
  task.target.code = "T";
  task.target.phones = shared;
  std::vector<PhoneId> replacements;
  for (PhoneId p : union_phones)
    if (std::find(shared.begin(), shared.end(), p) == shared.end()) replacements.push_back(p);
  if (replacements.empty()) replacements.assign(union_phones.begin(), union_phones.end());
  for (int32_t i = 0; i < spec.target_only_phones; i++) {
    PhoneId missing = U - spec.target_only_phones + 1 + i;
    std::uniform_int_distribution<size_t> pick(0, replacements.size() - 1);
    PhoneId repl = replacements[pick(rng)];
    task.remap.mapping[missing] = repl;
    for (int32_t a = 0; a < A; a++)
      for (int32_t j = 0; j < d; j++)
        means((missing - 1) * A + a, j) = means((repl - 1) * A + a, j) +
                                          spec.target_only_distance * spec.mean_scale * normal(rng);
    task.target.phones.push_back(missing);
  }
  std::sort(task.target.phones.begin(), task.target.phones.end());

  std::vector<LanguageData *> langs;
  for (auto &l : task.train_languages) langs.push_back(&l);
  langs.push_back(&task.target);
  for (int32_t p = 1; p <= U; p++) {
    std::set<std::string> tags;
    for (const LanguageData *l : langs)
      if (std::binary_search(l->phones.begin(), l->phones.end(), p)) tags.insert(l->code);
    task.universal.Add(PhoneSymbol(p - 1), tags);
  }

  std::vector<LanguageModelSource> sources(langs.size());
  for (size_t l = 0; l < langs.size(); l++) {
    sources[l].lang = langs[l];
    langs[l]->lexicon = MakeLexicon(spec, langs[l]->code, langs[l]->phones, rng, &sources[l].word_order);
    sources[l].channel.resize(d);
    for (int32_t j = 0; j < d; j++) sources[l].channel(j) = spec.channel_scale * normal(rng);
  }

  for (int32_t l = 0; l < spec.train_languages; l++)
    task.train_languages[l].splits["train"] =
        SampleSplit(spec, sources[l], means, l, 0, spec.pretrain_utterances);
  const int32_t t = spec.train_languages;
  task.target.splits["pool"] = SampleSplit(spec, sources[t], means, t, 1, spec.target_pool);
  task.target.splits["dev"] = SampleSplit(spec, sources[t], means, t, 2, spec.dev_utterances);
  task.target.splits["test"] = SampleSplit(spec, sources[t], means, t, 3, spec.test_utterances);

  std::mt19937_64 text_rng(MixSeed(spec.seed, (static_cast<uint64_t>(t + 1) << 40) | (5ULL << 32)));
  WordSampler sampler = MakeSampler(sources[t].word_order, spec.zipf_exponent);
  for (int32_t i = 0; i < spec.unpaired_utterances; i++)
    task.unpaired_text.push_back(SampleWords(spec, sampler, text_rng));
  return task;
}

std::vector<Utterance> SelectFewShot(const std::vector<Utterance> &pool, int32_t n,
                                     uint64_t seed) {
  if (n < 0 || n > static_cast<int32_t>(pool.size()))
    Fail(ErrorKind::kInvalidParameter, "cannot select " + std::to_string(n) + " of " +
                                           std::to_string(pool.size()) + " utterances");
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Utterance> out;
  for (int32_t i = 0; i < n; i++) out.push_back(pool[order[i]]);
  return out;
}

PhoneSeq CanonicalPhones(const std::vector<std::string> &words, const Lexicon &lex) {
  PhoneSeq out;
  for (const auto &w : words) {
    const auto *prons = lex.Find(w);
    if (prons == nullptr) Fail(ErrorKind::kOutOfVocabulary, "'" + w + "'");
    out.insert(out.end(), prons->front().begin(), prons->front().end());
  }
  return out;
}

namespace {

void SaveSplit(const std::vector<Utterance> &utts, const PhoneInventory &inv, int32_t dim,
               const std::string &stem) {
  std::string tsv;
  Eigen::Index rows = 0;
  for (const auto &u : utts) rows += u.features.rows();
  Matrix stacked(rows, dim);
  Eigen::Index at = 0;
  for (const auto &u : utts) {
    tsv += u.id + "\t" + std::to_string(u.features.rows()) + "\t" + Join(u.words) + "\t" +
           FormatPhones(u.phones, inv) + "\n";
    if (u.features.rows() > 0) stacked.middleRows(at, u.features.rows()) = u.features;
    at += u.features.rows();
  }
  WriteFileAtomic(stem + ".tsv", tsv);
  WriteFileAtomic(stem + ".emat", WriteEmat(stacked));
}

std::vector<Utterance> LoadSplit(const PhoneInventory &inv, int32_t dim, const std::string &stem) {
  std::string tsv_path = stem + ".tsv";
  Matrix stacked = ReadEmat(ReadFile(stem + ".emat"));
  if (stacked.rows() > 0 && stacked.cols() != dim)
    Fail(ErrorKind::kShapeMismatch, stem + ".emat: expected " + std::to_string(dim) + " columns");
  std::vector<Utterance> utts;
  std::string text = ReadFile(tsv_path);
  auto lines = SplitLines(text);
  Eigen::Index at = 0;
  for (size_t i = 0; i < lines.size(); i++) {
    if (StripWhitespace(lines[i]).empty()) continue;
    auto fields = Split(lines[i], '\t');
    auto where = tsv_path + " line " + std::to_string(i + 1);
    if (fields.size() != 4) Fail(ErrorKind::kMalformedLine, where + ": expected 4 fields");
    Utterance u;
    u.id = std::string(fields[0]);
    auto frames = ParseDouble(fields[1]);
    if (!frames || *frames < 0 || at + static_cast<Eigen::Index>(*frames) > stacked.rows())
      Fail(ErrorKind::kMalformedLine, where + ": bad frame count");
    for (auto w : SplitWhitespace(fields[2])) u.words.emplace_back(w);
    try {
      u.phones = ParsePhones(fields[3], inv);
    } catch (const Error &e) {
      FailWithContext(e, where);
    }
    u.features = stacked.middleRows(at, static_cast<Eigen::Index>(*frames));
    at += u.features.rows();
    utts.push_back(std::move(u));
  }
  if (at != stacked.rows()) Fail(ErrorKind::kShapeMismatch, stem + ": frame counts do not add up");
  return utts;
}

}  // namespace

void SaveTask(const SyntheticTask &task, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/";
  WriteFileAtomic(base + "task.conf", TaskSpecToConfig(task.spec));
  WriteFileAtomic(base + "universal.phones", WriteInventory(task.universal));
  WriteFileAtomic(base + "remap.txt", WriteRemapTable(task.remap, task.universal));
  std::vector<const LanguageData *> langs;
  for (const auto &l : task.train_languages) langs.push_back(&l);
  langs.push_back(&task.target);
  for (const LanguageData *l : langs) {
    WriteFileAtomic(base + l->code + ".lexicon", WriteLexicon(l->lexicon, task.universal));
    for (const auto &[name, utts] : l->splits)
      SaveSplit(utts, task.universal, task.spec.feature_dim, base + l->code + "." + name);
  }
  std::string text;
  for (const auto &words : task.unpaired_text) text += Join(words) + "\n";
  WriteFileAtomic(base + task.target.code + ".unpaired.txt", text);
}

SyntheticTask LoadTask(const std::string &dir) {
  const std::string base = dir + "/";
  SyntheticTask task;
  KeyValueConfig config = KeyValueConfig::Parse(ReadFile(base + "task.conf"));
  task.spec = TaskSpecFromConfig(config);
  config.CheckAllUsed({"task"});
  ValidateTaskSpec(task.spec);
  auto with_path = [](const std::string &path, auto &&load) {
    try {
      return load(ReadFile(path));
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kIo) throw;
      FailWithContext(e, path);
    }
  };
  task.universal = with_path(base + "universal.phones", [](const std::string &t) { return LoadInventory(t); });
  task.remap = with_path(base + "remap.txt",
                         [&](const std::string &t) { return LoadRemapTable(t, task.universal); });
  auto load_language = [&](const std::string &code, const std::vector<std::string> &splits) {
    LanguageData l;
    l.code = code;
    for (PhoneId p = 1; p <= task.universal.Size(); p++)
      if (task.universal.Languages(p).count(code)) l.phones.push_back(p);
    l.lexicon = with_path(base + code + ".lexicon",
                          [&](const std::string &t) { return LoadLexicon(t, task.universal); });
    for (const auto &s : splits)
      l.splits[s] = LoadSplit(task.universal, task.spec.feature_dim, base + code + "." + s);
    return l;
  };
  for (int32_t i = 0; i < task.spec.train_languages; i++)
    task.train_languages.push_back(load_language("L" + std::to_string(i + 1), {"train"}));
  task.target = load_language("T", {"pool", "dev", "test"});
  std::string text = ReadFile(base + "T.unpaired.txt");
  for (auto line : SplitLines(text)) {
    if (StripWhitespace(line).empty()) continue;
    std::vector<std::string> words;
    for (auto w : SplitWhitespace(line)) words.emplace_back(w);
    task.unpaired_text.push_back(std::move(words));
  }
  return task;
}

}  // namespace xlmmi
