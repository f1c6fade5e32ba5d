// include/xlmmi/synthetic-task.h

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

#ifndef XLMMI_SYNTHETIC_TASK_H_
#define XLMMI_SYNTHETIC_TASK_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xlmmi/config.h"
#include "xlmmi/lfmmi.h"
#include "xlmmi/phone-inventory.h"

namespace xlmmi {

// Parameters of a synthetic multilingual task. Phone ids 1..universal_phones
// form the universal inventory; the last `target_only_phones` ids are never
// used by a training language.
struct SyntheticTaskSpec {
  int32_t universal_phones = 24;
  int32_t feature_dim = 16;
  double mean_scale = 1.0;      // std-dev of each phone-mean coordinate
  double spread = 1.0;          // isotropic per-phone std-dev
  double noise = 1.0;           // multiplies `spread`; 0 gives noiseless frames
  double channel_scale = 0.0;   // std-dev of the per-language feature offset
  int32_t allophones = 1;       // mean vectors per phone, one drawn per occurrence
  double target_only_distance = 0.3;  // target-only mean offset from its replacement
  int32_t min_frames = 2;       // per phone occurrence
  double frame_continue = 0.5;  // geometric continuation probability
  int32_t min_words = 2;
  int32_t max_words = 4;
  int32_t min_word_phones = 2;
  int32_t max_word_phones = 4;
  int32_t lexicon_size = 100;
  double variant_prob = 0.1;    // chance a word gets a second pronunciation
  double zipf_exponent = 1.0;
  int32_t train_languages = 3;
  int32_t train_language_phones = 14;
  int32_t target_phones = 12;
  int32_t target_only_phones = 2;
  int32_t pretrain_utterances = 300;  // per training language
  int32_t target_pool = 1000;
  int32_t dev_utterances = 50;
  int32_t test_utterances = 100;
  int32_t unpaired_utterances = 2000;
  uint64_t seed = 1;
};

// Reads keys under [task]; unknown keys are left for CheckAllUsed().
SyntheticTaskSpec TaskSpecFromConfig(const KeyValueConfig &config);
std::string TaskSpecToConfig(const SyntheticTaskSpec &spec);

// Throws kInvalidSpec.
void ValidateTaskSpec(const SyntheticTaskSpec &spec);

struct Utterance {
  std::string id;
  std::vector<std::string> words;
  PhoneSeq phones;  // spoken pronunciation, universal ids
  Matrix features;  // frames x feature_dim
};

struct LanguageData {
  std::string code;
  std::vector<PhoneId> phones;  // sorted universal ids
  Lexicon lexicon;              // over the universal inventory
  // "train" for training languages; "pool", "dev", "test" for the target.
  std::map<std::string, std::vector<Utterance>> splits;
};

struct SyntheticTask {
  SyntheticTaskSpec spec;
  PhoneInventory universal;
  std::vector<LanguageData> train_languages;
  LanguageData target;
  RemapTable remap;  // target-only phone -> training phone
  // Target-language word sequences drawn independently of every split.
  std::vector<std::vector<std::string>> unpaired_text;

  std::set<PhoneId> TrainingPhones() const;
};

// Deterministic in `spec` (including its seed). Throws kInvalidSpec.
SyntheticTask GenerateTask(const SyntheticTaskSpec &spec);

// `n` utterances of `pool` chosen by a seeded shuffle, in shuffled order.
// Throws kInvalidParameter when `n` exceeds the pool.
std::vector<Utterance> SelectFewShot(const std::vector<Utterance> &pool, int32_t n, uint64_t seed);

// Directory layout: task.conf, universal.phones, remap.txt, <code>.lexicon,
// <code>.<split>.tsv (id, frames, words, phones) with <code>.<split>.emat
// holding the stacked frames, and <target>.unpaired.txt.
void SaveTask(const SyntheticTask &task, const std::string &dir);
SyntheticTask LoadTask(const std::string &dir);

// Canonical phone text of a word sequence: first pronunciation of each word.
PhoneSeq CanonicalPhones(const std::vector<std::string> &words, const Lexicon &lex);

// SplitMix64 step, used to derive independent seeds from one.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

}  // namespace xlmmi

#endif  // XLMMI_SYNTHETIC_TASK_H_
