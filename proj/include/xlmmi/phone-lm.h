// include/xlmmi/phone-lm.h

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

#ifndef XLMMI_PHONE_LM_H_
#define XLMMI_PHONE_LM_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xlmmi/phone-inventory.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

// Predicted-symbol ids besides phones (1..V).
inline constexpr int32_t kEos = -1;
inline constexpr int32_t kBos = -2;

// History, oldest symbol first.
using LmContext = std::vector<int32_t>;

struct WeightedCorpus {
  std::vector<PhoneSeq> utterances;
  double weight = 1.0;
};

// Fractional n-gram counts; levels[m-1] holds order-m counts keyed by
// context (length m-1) then successor. Every order-n event also counts at
// each lower order with its context truncated from the left.
struct NGramCounts {
  int32_t order = 0;
  std::vector<std::map<LmContext, std::map<int32_t, double>>> levels;
};

NGramCounts AccumulateCounts(const std::vector<WeightedCorpus> &corpora, int32_t order);

struct NGramContextEntry {
  // p(w | context), interpolated. At order 1 every phone and EOS is listed;
  // at higher orders only successors seen with this context.
  std::map<int32_t, double> probs;
  // Probability mass multiplier for successors not listed (unused at order 1).
  double backoff = 1.0;
};

class NGramModel {
 public:
  NGramModel() = default;
  NGramModel(int32_t order, PhoneInventory vocab);

  int32_t order() const { return order_; }
  const PhoneInventory &vocab() const { return vocab_; }
  int32_t VocabSize() const { return vocab_.Size(); }

  // levels()[m-1]: contexts of length m-1 observed at order m.
  const std::vector<std::map<LmContext, NGramContextEntry>> &levels() const {
    return levels_;
  }
  std::vector<std::map<LmContext, NGramContextEntry>> &mutable_levels() { return levels_; }

  // p(symbol | history) with backoff; `history` may be longer than order-1,
  // only its most recent symbols are used. `symbol` is a phone id or kEos.
  double Prob(const LmContext &history, int32_t symbol) const;

  // Same, using at most the first `order` levels of the model.
  double ProbAtOrder(const LmContext &history, int32_t symbol, int32_t order) const;

  const NGramContextEntry *FindContext(const LmContext &context) const;

  // The history every utterance starts with: order-1 BOS symbols.
  LmContext InitialContext() const {
    return LmContext(order_ > 0 ? order_ - 1 : 0, kBos);
  }

 private:
  int32_t order_ = 0;
  PhoneInventory vocab_;
  std::vector<std::map<LmContext, NGramContextEntry>> levels_;
};

// Interpolated Witten-Bell estimate from weighted corpora, recursing to the
// uniform distribution over phones + EOS. Order 0 ignores the corpora.
// Throws kInvalidOrder, kEmptyTrainingData, kUnknownPhone.
NGramModel EstimateNGram(const std::vector<WeightedCorpus> &corpora, int32_t order,
                         const PhoneInventory &vocab);

// Sum of ln p over the phones and the final EOS. Throws kUnknownPhone.
double SequenceLogProb(const NGramModel &model, const PhoneSeq &seq);

// Backoff acceptor over phone-id labels: one state per observed context,
// epsilon arcs carry ln(backoff), start state is the all-BOS context.
WeightedGraph LmToFsa(const NGramModel &model);

// Scores `seq` on a backoff acceptor taking an epsilon arc only when the
// current state has no arc for the next symbol (or no final weight at the
// end). Returns -inf if the walk gets stuck.
double BackoffAcceptorScore(const WeightedGraph &lm_fsa, const PhoneSeq &seq);

// ARPA-style text with log10 probabilities and backoffs.
std::string WriteArpa(const NGramModel &model);
NGramModel ReadArpa(std::string_view text, const PhoneInventory &vocab);

// One utterance per line, space-separated phone symbols.
std::vector<PhoneSeq> LoadCorpus(std::string_view text, const PhoneInventory &vocab);
std::string WriteCorpus(const std::vector<PhoneSeq> &utterances, const PhoneInventory &vocab);

struct ManifestEntry {
  std::string path;
  double weight = 1.0;
};
// Lines `path<TAB>weight`. Relative paths are kept as written.
std::vector<ManifestEntry> LoadManifest(std::string_view text);

}  // namespace xlmmi

#endif  // XLMMI_PHONE_LM_H_
