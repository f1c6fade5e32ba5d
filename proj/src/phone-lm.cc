// src/phone-lm.cc

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

#include "xlmmi/phone-lm.h"

#include <algorithm>
#include <cmath>

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"

namespace xlmmi {

namespace {

LmContext Suffix(const LmContext &history, size_t length) {
  length = std::min(length, history.size());
  return LmContext(history.end() - static_cast<std::ptrdiff_t>(length), history.end());
}

void CheckPhones(const std::vector<WeightedCorpus> &corpora, const PhoneInventory &vocab) {
  for (const WeightedCorpus &corpus : corpora)
    for (const PhoneSeq &utt : corpus.utterances)
      for (PhoneId p : utt)
        if (!vocab.Contains(p))
          Fail(ErrorKind::kUnknownPhone, "phone id " + std::to_string(p) + " not in vocabulary");
}

void AccumulateUtterance(const PhoneSeq &utt, int32_t order, NGramCounts *counts) {
  LmContext padded(order - 1, kBos);
  padded.insert(padded.end(), utt.begin(), utt.end());
  padded.push_back(kEos);
  for (size_t i = order - 1; i < padded.size(); i++) {
    for (int32_t m = 1; m <= order; m++) {
      LmContext context(padded.begin() + static_cast<std::ptrdiff_t>(i - (m - 1)),
                        padded.begin() + static_cast<std::ptrdiff_t>(i));
      counts->levels[m - 1][context][padded[i]] += 1.0;
    }
  }
}

}  // namespace

NGramCounts AccumulateCounts(const std::vector<WeightedCorpus> &corpora, int32_t order) {
  if (order < 0) Fail(ErrorKind::kInvalidOrder, "order " + std::to_string(order));
  for (const WeightedCorpus &corpus : corpora)
    if (!(corpus.weight >= 0.0) || !std::isfinite(corpus.weight))
      Fail(ErrorKind::kInvalidParameter, "corpus weight must be finite and non-negative");

  // Raw counts per corpus are collected independently; the weighted merge
  // runs in corpus order so the result does not depend on scheduling.
  const int32_t num_corpora = static_cast<int32_t>(corpora.size());
  std::vector<NGramCounts> raw(num_corpora);
#pragma omp parallel for schedule(dynamic)
  for (int32_t c = 0; c < num_corpora; c++) {
    raw[c].order = order;
    raw[c].levels.resize(order);
    if (corpora[c].weight == 0.0) continue;
    for (const PhoneSeq &utt : corpora[c].utterances) AccumulateUtterance(utt, order, &raw[c]);
  }

  NGramCounts total;
  total.order = order;
  total.levels.resize(order);
  for (int32_t c = 0; c < num_corpora; c++) {
    const double weight = corpora[c].weight;
    if (weight == 0.0) continue;
    for (int32_t m = 0; m < order; m++)
      for (const auto &[context, successors] : raw[c].levels[m]) {
        auto &dst = total.levels[m][context];
        for (const auto &[symbol, count] : successors) dst[symbol] += weight * count;
      }
  }
  return total;
}

NGramModel::NGramModel(int32_t order, PhoneInventory vocab)
    : order_(order), vocab_(std::move(vocab)), levels_(std::max(order, 0)) {}

const NGramContextEntry *NGramModel::FindContext(const LmContext &context) const {
  size_t level = context.size() + 1;
  if (level > levels_.size()) return nullptr;
  auto it = levels_[level - 1].find(context);
  return it == levels_[level - 1].end() ? nullptr : &it->second;
}

double NGramModel::ProbAtOrder(const LmContext &history, int32_t symbol,
                               int32_t order) const {
  if (order == 0) return 1.0 / (VocabSize() + 1);
  const auto &contexts = levels_[order - 1];
  auto it = contexts.find(Suffix(history, order - 1));
  if (it == contexts.end()) return ProbAtOrder(history, symbol, order - 1);
  auto p = it->second.probs.find(symbol);
  if (p != it->second.probs.end()) return p->second;
  return it->second.backoff * ProbAtOrder(history, symbol, order - 1);
}

double NGramModel::Prob(const LmContext &history, int32_t symbol) const {
  return ProbAtOrder(history, symbol, order_);
}

NGramModel EstimateNGram(const std::vector<WeightedCorpus> &corpora, int32_t order,
                         const PhoneInventory &vocab) {
  if (order < 0) Fail(ErrorKind::kInvalidOrder, "order " + std::to_string(order));
  if (vocab.Size() == 0) Fail(ErrorKind::kInvalidParameter, "empty vocabulary");
  NGramModel model(order, vocab);
  if (order == 0) return model;
  CheckPhones(corpora, vocab);

  NGramCounts counts = AccumulateCounts(corpora, order);
  if (counts.levels[0].empty())
    Fail(ErrorKind::kEmptyTrainingData, "no positive-weight utterances");

  const int32_t num_symbols = vocab.Size() + 1;
  auto &levels = model.mutable_levels();
  for (int32_t m = 1; m <= order; m++) {
    for (const auto &[context, successors] : counts.levels[m - 1]) {
      double total = 0.0, distinct = 0.0;
      for (const auto &[symbol, count] : successors) {
        total += count;
        if (count > 0.0) distinct += 1.0;
      }
      NGramContextEntry entry;
      const double denom = total + distinct;
      if (m == 1) {
        for (int32_t symbol = 1; symbol <= num_symbols; symbol++) {
          int32_t s = symbol == num_symbols ? kEos : symbol;
          auto it = successors.find(s);
          double c = it == successors.end() ? 0.0 : it->second;
          entry.probs[s] = (c + distinct / num_symbols) / denom;
        }
      } else {
        for (const auto &[symbol, count] : successors) {
          double lower = model.ProbAtOrder(context, symbol, m - 1);
          entry.probs[symbol] = (count + distinct * lower) / denom;
        }
        entry.backoff = distinct / denom;
      }
      levels[m - 1].emplace(context, std::move(entry));
    }
  }
  return model;
}

double SequenceLogProb(const NGramModel &model, const PhoneSeq &seq) {
  LmContext history = model.InitialContext();
  double logprob = 0.0;
  for (PhoneId p : seq) {
    if (!model.vocab().Contains(p))
      Fail(ErrorKind::kUnknownPhone, "phone id " + std::to_string(p));
    logprob += std::log(model.Prob(history, p));
    if (!history.empty()) {
      history.erase(history.begin());
      history.push_back(p);
    }
  }
  return logprob + std::log(model.Prob(history, kEos));
}

WeightedGraph LmToFsa(const NGramModel &model) {
  WeightedGraph g;
  g.semantics = LabelSemantics::kPhoneId;
  const int32_t num_phones = model.VocabSize();
  if (model.order() == 0) {
    const double w = -std::log(static_cast<double>(num_phones + 1));
    StateId s = g.AddState();
    for (PhoneId p = 1; p <= num_phones; p++) g.AddArc(s, s, p, w);
    g.starts.push_back({s, kLogOne});
    g.finals.push_back({s, w});
    return g;
  }

  const int32_t order = model.order();
  const auto &levels = model.levels();
  std::map<LmContext, StateId> state_of;
  for (int32_t m = 1; m <= order; m++)
    for (const auto &[context, entry] : levels[m - 1]) state_of.emplace(context, g.AddState());

  auto longest_observed = [&](LmContext context) {
    if (static_cast<int32_t>(context.size()) > order - 1)
      context.erase(context.begin(), context.end() - (order - 1));
    while (true) {
      auto it = state_of.find(context);
      if (it != state_of.end()) return it->second;
      context.erase(context.begin());
    }
  };

  for (int32_t m = 1; m <= order; m++) {
    for (const auto &[context, entry] : levels[m - 1]) {
      StateId src = state_of.at(context);
      for (const auto &[symbol, prob] : entry.probs) {
        if (prob <= 0.0) continue;
        if (symbol == kEos) {
          g.finals.push_back({src, std::log(prob)});
          continue;
        }
        LmContext next = context;
        next.push_back(symbol);
        g.AddArc(src, longest_observed(next), symbol, std::log(prob));
      }
      if (m > 1) {
        LmContext lower(context.begin() + 1, context.end());
        g.AddArc(src, state_of.at(lower), kEpsilon, std::log(entry.backoff));
      }
    }
  }
  g.starts.push_back({longest_observed(model.InitialContext()), kLogOne});
  return g;
}

double BackoffAcceptorScore(const WeightedGraph &lm_fsa, const PhoneSeq &seq) {
  std::vector<std::vector<int32_t>> out(lm_fsa.num_states);
  for (int32_t a = 0; a < static_cast<int32_t>(lm_fsa.arcs.size()); a++)
    out[lm_fsa.arcs[a].src].push_back(a);
  std::vector<double> final(lm_fsa.num_states, kLogZero);
  for (const StateWeight &f : lm_fsa.finals) final[f.state] = LogAdd(final[f.state], f.weight);
  if (lm_fsa.starts.size() != 1) return kLogZero;

  auto find_arc = [&](StateId s, Label label) -> int32_t {
    for (int32_t a : out[s])
      if (lm_fsa.arcs[a].label == label) return a;
    return -1;
  };
  StateId state = lm_fsa.starts[0].state;
  double score = lm_fsa.starts[0].weight;
  for (PhoneId p : seq) {
    while (true) {
      int32_t a = find_arc(state, p);
      if (a >= 0) {
        score += lm_fsa.arcs[a].weight;
        state = lm_fsa.arcs[a].dst;
        break;
      }
      int32_t eps = find_arc(state, kEpsilon);
      if (eps < 0) return kLogZero;
      score += lm_fsa.arcs[eps].weight;
      state = lm_fsa.arcs[eps].dst;
    }
  }
  while (final[state] == kLogZero) {
    int32_t eps = find_arc(state, kEpsilon);
    if (eps < 0) return kLogZero;
    score += lm_fsa.arcs[eps].weight;
    state = lm_fsa.arcs[eps].dst;
  }
  return score + final[state];
}

namespace {

std::string SymbolName(int32_t symbol, const PhoneInventory &vocab) {
  if (symbol == kBos) return "<s>";
  if (symbol == kEos) return "</s>";
  return vocab.Symbol(symbol);
}

std::string NGramName(const LmContext &context, int32_t symbol, const PhoneInventory &vocab) {
  std::string out;
  for (int32_t s : context) out += SymbolName(s, vocab) + " ";
  return out + SymbolName(symbol, vocab);
}

constexpr double kNoProb = -99.0;

}  // namespace

std::string WriteArpa(const NGramModel &model) {
  const auto &vocab = model.vocab();
  if (model.order() == 0) {
    return "\\data\\\nngram 0=1\n\n\\0-grams:\n" +
           FormatDouble(std::log10(1.0 / (model.VocabSize() + 1))) + "\t<uniform>\n\n\\end\\\n";
  }
  const int32_t order = model.order();
  const auto &levels = model.levels();
  std::vector<std::string> sections(order);
  std::vector<int64_t> sizes(order, 0);
  for (int32_t m = 1; m <= order; m++) {
    auto bow_suffix = [&](const LmContext &ngram) -> std::string {
      if (m == order) return "";
      auto it = levels[m].find(ngram);
      if (it == levels[m].end()) return "";
      return "\t" + FormatDouble(std::log10(it->second.backoff));
    };
    // Contexts at order m+1 that end with BOS are never predicted; they get
    // placeholder entries so their backoff weight has a home.
    if (m < order) {
      for (const auto &[context, entry] : levels[m]) {
        if (context.back() != kBos) continue;
        LmContext head(context.begin(), context.end() - 1);
        sections[m - 1] += FormatDouble(kNoProb) + "\t" + NGramName(head, kBos, vocab) +
                           bow_suffix(context) + "\n";
        sizes[m - 1]++;
      }
    }
    for (const auto &[context, entry] : levels[m - 1]) {
      for (const auto &[symbol, prob] : entry.probs) {
        LmContext ngram = context;
        ngram.push_back(symbol);
        sections[m - 1] += FormatDouble(std::log10(prob)) + "\t" +
                           NGramName(context, symbol, vocab) + bow_suffix(ngram) + "\n";
        sizes[m - 1]++;
      }
    }
  }
  std::string out = "\\data\\\n";
  for (int32_t m = 1; m <= order; m++)
    out += "ngram " + std::to_string(m) + "=" + std::to_string(sizes[m - 1]) + "\n";
  for (int32_t m = 1; m <= order; m++)
    out += "\n\\" + std::to_string(m) + "-grams:\n" + sections[m - 1];
  out += "\n\\end\\\n";
  return out;
}

NGramModel ReadArpa(std::string_view text, const PhoneInventory &vocab) {
  auto lines = SplitLines(text);
  std::string section = "\\data\\";
  auto fail = [&](size_t i, const std::string &msg) {
    Fail(ErrorKind::kParse,
         "section " + section + " line " + std::to_string(i + 1) + ": " + msg);
  };
  auto symbol_id = [&](std::string_view tok, size_t i) -> int32_t {
    if (tok == "<s>") return kBos;
    if (tok == "</s>") return kEos;
    PhoneId id = vocab.Find(tok);
    if (id == 0) fail(i, "unknown symbol '" + std::string(tok) + "'");
    return id;
  };
  auto parse_log10 = [&](std::string_view tok, size_t i) {
    auto v = ParseDouble(tok);
    if (!v || std::isnan(*v)) fail(i, "bad number '" + std::string(tok) + "'");
    return *v;
  };

  size_t i = 0;
  while (i < lines.size() && StripWhitespace(lines[i]).empty()) i++;
  if (i == lines.size() || StripWhitespace(lines[i]) != "\\data\\") fail(i, "expected \\data\\");
  i++;
  std::vector<int64_t> declared;
  bool uniform = false;
  for (; i < lines.size(); i++) {
    std::string_view line = StripWhitespace(lines[i]);
    if (line.empty()) continue;
    if (line.rfind("ngram ", 0) != 0) break;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(i, "malformed ngram count");
    auto n = ParseDouble(StripWhitespace(line.substr(6, eq - 6)));
    auto c = ParseDouble(StripWhitespace(line.substr(eq + 1)));
    if (!n || !c) fail(i, "malformed ngram count");
    if (*n == 0 && declared.empty()) {
      uniform = true;
    } else if (uniform || *n != static_cast<double>(declared.size() + 1)) {
      fail(i, "ngram counts must be listed in order");
    }
    declared.push_back(static_cast<int64_t>(*c));
  }
  if (declared.empty()) fail(i, "no ngram counts");

  const int32_t order = uniform ? 0 : static_cast<int32_t>(declared.size());
  NGramModel model(order, vocab);
  auto &levels = model.mutable_levels();
  bool ended = false;
  int32_t current = -1;
  std::vector<int64_t> seen(declared.size(), 0);
  for (; i < lines.size(); i++) {
    std::string_view line = StripWhitespace(lines[i]);
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      section = std::string(line);
      auto dash = line.find("-grams:");
      if (dash == std::string_view::npos) fail(i, "unknown section");
      auto n = ParseDouble(line.substr(1, dash - 1));
      if (!n) fail(i, "unknown section");
      current = static_cast<int32_t>(*n);
      if (uniform ? current != 0 : (current < 1 || current > order))
        fail(i, "section order out of range");
      continue;
    }
    if (current < 0) fail(i, "entry outside any section");
    if (current == 0) {
      seen[0]++;
      continue;
    }
    auto fields = Split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) fail(i, "expected 2 or 3 tab-separated fields");
    double logp = parse_log10(fields[0], i);
    auto toks = SplitWhitespace(fields[1]);
    if (static_cast<int32_t>(toks.size()) != current) fail(i, "n-gram length mismatch");
    LmContext ngram;
    for (auto tok : toks) ngram.push_back(symbol_id(tok, i));
    LmContext context(ngram.begin(), ngram.end() - 1);
    int32_t symbol = ngram.back();
    if (symbol != kBos) levels[current - 1][context].probs[symbol] = std::pow(10.0, logp);
    if (fields.size() == 3) {
      if (current == order) fail(i, "backoff weight on a highest-order n-gram");
      levels[current][ngram].backoff = std::pow(10.0, parse_log10(fields[2], i));
    }
    seen[current - 1]++;
  }
  if (!ended) fail(lines.size(), "missing \\end\\ marker");
  for (size_t m = 0; m < declared.size(); m++)
    if (seen[m] != declared[m])
      Fail(ErrorKind::kParse, "section \\" + std::to_string(uniform ? 0 : m + 1) +
                                  "-grams: declared " + std::to_string(declared[m]) +
                                  " entries, found " + std::to_string(seen[m]));
  if (order >= 1 && levels[0].empty()) Fail(ErrorKind::kParse, "no unigram entries");
  return model;
}

std::vector<PhoneSeq> LoadCorpus(std::string_view text, const PhoneInventory &vocab) {
  std::vector<PhoneSeq> corpus;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    if (StripWhitespace(lines[i]).empty()) continue;
    try {
      corpus.push_back(ParsePhones(lines[i], vocab));
    } catch (const Error &e) {
      FailWithContext(e, "line " + std::to_string(i + 1));
    }
  }
  return corpus;
}

std::string WriteCorpus(const std::vector<PhoneSeq> &utterances, const PhoneInventory &vocab) {
  std::string out;
  for (const PhoneSeq &utt : utterances) out += FormatPhones(utt, vocab) + "\n";
  return out;
}

std::vector<ManifestEntry> LoadManifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    if (StripWhitespace(lines[i]).empty()) continue;
    auto fields = Split(lines[i], '\t');
    std::optional<double> weight;
    if (fields.size() == 2) weight = ParseDouble(StripWhitespace(fields[1]));
    if (fields.size() != 2 || StripWhitespace(fields[0]).empty() || !weight ||
        !(*weight >= 0.0) || !std::isfinite(*weight))
      Fail(ErrorKind::kMalformedLine,
           "expected 'path<TAB>weight' at line " + std::to_string(i + 1));
    entries.push_back({std::string(StripWhitespace(fields[0])), *weight});
  }
  return entries;
}

}  // namespace xlmmi
