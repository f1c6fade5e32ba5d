// src/decode.cc

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

#include "xlmmi/decode.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "xlmmi/error.h"

namespace xlmmi {

namespace {

struct Backpointer {
  StateId src = -1;  // -1: start entry
  int32_t arc = -1;
};

bool Better(double score, Backpointer key, double best, Backpointer best_key) {
  if (score != best) return score > best;
  return std::tie(key.src, key.arc) < std::tie(best_key.src, best_key.arc);
}

}  // namespace

ViterbiResult Viterbi(const WeightedGraph &g, const EmissionMatrix &emissions) {
  Validate(g);
  if (NumPdfs(g) > emissions.cols())
    Fail(ErrorKind::kLabelOutOfRange, "graph pdf-ids exceed emission columns");
  const int32_t num_frames = static_cast<int32_t>(emissions.rows());
  const int32_t n = g.num_states;
  std::vector<std::vector<int32_t>> in_emitting(n);
  std::vector<std::vector<int32_t>> eps_out(n);
  for (int32_t a = 0; a < static_cast<int32_t>(g.arcs.size()); a++) {
    if (g.arcs[a].label == kEpsilon) eps_out[g.arcs[a].src].push_back(a);
    else in_emitting[g.arcs[a].dst].push_back(a);
  }
  std::vector<int32_t> eps_order;
  for (StateId s : EpsilonTopologicalOrder(g))
    for (int32_t a : eps_out[s]) eps_order.push_back(a);

  std::vector<std::vector<double>> score(num_frames + 1, std::vector<double>(n, kLogZero));
  std::vector<std::vector<Backpointer>> back(num_frames + 1, std::vector<Backpointer>(n));
  auto closure = [&](int32_t t) {
    for (int32_t a : eps_order) {
      const Arc &arc = g.arcs[a];
      if (score[t][arc.src] == kLogZero) continue;
      double cand = score[t][arc.src] + arc.weight;
      Backpointer key{arc.src, a};
      if (Better(cand, key, score[t][arc.dst], back[t][arc.dst])) {
        score[t][arc.dst] = cand;
        back[t][arc.dst] = key;
      }
    }
  };
  for (const StateWeight &s : g.starts)
    if (s.weight > score[0][s.state]) score[0][s.state] = s.weight;
  closure(0);
  for (int32_t t = 0; t < num_frames; t++) {
#pragma omp parallel for if (n >= 4096) schedule(static)
    for (StateId d = 0; d < n; d++) {
      for (int32_t a : in_emitting[d]) {
        const Arc &arc = g.arcs[a];
        if (score[t][arc.src] == kLogZero) continue;
        double cand = score[t][arc.src] + arc.weight + emissions(t, LabelToPdf(arc.label));
        Backpointer key{arc.src, a};
        if (Better(cand, key, score[t + 1][d], back[t + 1][d])) {
          score[t + 1][d] = cand;
          back[t + 1][d] = key;
        }
      }
    }
    closure(t + 1);
  }

  std::vector<double> final(n, kLogZero);
  for (const StateWeight &f : g.finals) final[f.state] = std::max(final[f.state], f.weight);
  ViterbiResult result;
  StateId best = -1;
  for (StateId s = 0; s < n; s++) {
    if (score[num_frames][s] == kLogZero || final[s] == kLogZero) continue;
    double total = score[num_frames][s] + final[s];
    if (total > result.score) {
      result.score = total;
      best = s;
    }
  }
  if (best < 0)
    Fail(ErrorKind::kNoAcceptingPath,
         "no path of " + std::to_string(num_frames) + " frames in decode graph");

  int32_t t = num_frames;
  StateId s = best;
  while (back[t][s].arc >= 0) {
    const Arc &arc = g.arcs[back[t][s].arc];
    result.arcs.push_back(back[t][s].arc);
    if (arc.label != kEpsilon) t--;
    s = arc.src;
  }
  std::reverse(result.arcs.begin(), result.arcs.end());

  std::map<int32_t, int32_t> readout;
  for (const Readout &r : g.readouts) readout.emplace(r.arc, r.phone);
  for (int32_t a : result.arcs) {
    auto it = readout.find(a);
    if (it != readout.end()) result.phones.push_back(it->second);
  }
  return result;
}

AlignmentCosts EditDistance(const PhoneSeq &ref, const PhoneSeq &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int32_t>> d(n + 1, std::vector<int32_t>(m + 1));
  for (size_t i = 0; i <= n; i++) d[i][0] = static_cast<int32_t>(i);
  for (size_t j = 0; j <= m; j++) d[0][j] = static_cast<int32_t>(j);
  for (size_t i = 1; i <= n; i++)
    for (size_t j = 1; j <= m; j++)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1] ? 1 : 0),
                          d[i][j - 1] + 1, d[i - 1][j] + 1});

  AlignmentCosts costs;
  costs.reference_length = static_cast<int32_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int32_t diag = ref[i - 1] != hyp[j - 1] ? 1 : 0;
      if (d[i][j] == d[i - 1][j - 1] + diag) {
        costs.substitutions += diag;
        i--;
        j--;
        continue;
      }
    }
    if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      costs.insertions++;
      j--;
    } else {
      costs.deletions++;
      i--;
    }
  }
  return costs;
}

CorpusScore ScoreCorpus(const std::vector<PhoneSeq> &refs, const std::vector<PhoneSeq> &hyps,
                        std::vector<std::string> ids) {
  if (refs.size() != hyps.size())
    Fail(ErrorKind::kLengthMismatch, std::to_string(refs.size()) + " references vs " +
                                         std::to_string(hyps.size()) + " hypotheses");
  if (ids.empty())
    for (size_t i = 0; i < refs.size(); i++) ids.push_back(std::to_string(i));
  if (ids.size() != refs.size()) Fail(ErrorKind::kLengthMismatch, "utterance id count");
  CorpusScore score;
  score.ids = std::move(ids);
  for (size_t i = 0; i < refs.size(); i++) {
    AlignmentCosts c = EditDistance(refs[i], hyps[i]);
    score.total.insertions += c.insertions;
    score.total.deletions += c.deletions;
    score.total.substitutions += c.substitutions;
    score.total.reference_length += c.reference_length;
    score.utterances.push_back(c);
  }
  return score;
}

namespace {

std::string ReportRow(const std::string &id, const AlignmentCosts &c) {
  std::string per = "NA";
  if (auto p = c.Per()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *p);
    per = buf;
  }
  return id + "\t" + per + "\t" + std::to_string(c.insertions) + "\t" +
         std::to_string(c.deletions) + "\t" + std::to_string(c.substitutions) + "\n";
}

}  // namespace

std::string WriteScoreReport(const CorpusScore &score) {
  std::string out;
  for (size_t i = 0; i < score.utterances.size(); i++)
    out += ReportRow(score.ids[i], score.utterances[i]);
  return out + ReportRow("TOTAL", score.total);
}

}  // namespace xlmmi
