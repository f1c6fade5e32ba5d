// src/wfsa.cc

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

#include "xlmmi/wfsa.h"

#include <algorithm>
#include <charconv>

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"

namespace xlmmi {

std::string_view LabelSemanticsName(LabelSemantics s) {
  return s == LabelSemantics::kPdfId ? "pdf-id" : "phone-id";
}

namespace {

bool InRange(StateId s, int32_t n) { return s >= 0 && s < n; }

// Adjacency lists built once per call; arcs with -inf weight are skipped.
std::vector<std::vector<int32_t>> OutArcs(const WeightedGraph &g,
                                          bool eps_only = false) {
  std::vector<std::vector<int32_t>> out(g.num_states);
  for (int32_t a = 0; a < static_cast<int32_t>(g.arcs.size()); a++) {
    const Arc &arc = g.arcs[a];
    if (arc.weight == kLogZero) continue;
    if (eps_only && arc.label != kEpsilon) continue;
    out[arc.src].push_back(a);
  }
  return out;
}

// Kahn's algorithm; returns an empty vector if the arc subset has a cycle
// (or the graph has no states).
std::vector<StateId> TopoSort(const WeightedGraph &g,
                              const std::vector<std::vector<int32_t>> &out) {
  std::vector<int32_t> indegree(g.num_states, 0);
  for (const auto &arcs : out)
    for (int32_t a : arcs) indegree[g.arcs[a].dst]++;
  std::vector<StateId> order, stack;
  order.reserve(g.num_states);
  for (StateId s = g.num_states - 1; s >= 0; s--)
    if (indegree[s] == 0) stack.push_back(s);
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    order.push_back(s);
    for (int32_t a : out[s])
      if (--indegree[g.arcs[a].dst] == 0) stack.push_back(g.arcs[a].dst);
  }
  if (static_cast<int32_t>(order.size()) != g.num_states) order.clear();
  return order;
}

}  // namespace

void Validate(const WeightedGraph &g) {
  if (g.num_states <= 0) Fail(ErrorKind::kInvalidGraph, "graph has no states");
  for (size_t i = 0; i < g.arcs.size(); i++) {
    const Arc &arc = g.arcs[i];
    if (!InRange(arc.src, g.num_states) || !InRange(arc.dst, g.num_states))
      Fail(ErrorKind::kInvalidGraph,
           "arc " + std::to_string(i) + " references a state out of range");
    if (arc.label < 0)
      Fail(ErrorKind::kInvalidGraph,
           "arc " + std::to_string(i) + " has a negative label");
    if (std::isnan(arc.weight) || arc.weight == -kLogZero)
      Fail(ErrorKind::kInvalidGraph,
           "arc " + std::to_string(i) + " has an invalid weight");
  }
  auto check_entries = [&](const std::vector<StateWeight> &entries,
                           const char *what) {
    bool any = false;
    for (const StateWeight &e : entries) {
      if (!InRange(e.state, g.num_states))
        Fail(ErrorKind::kInvalidGraph,
             std::string(what) + " state " + std::to_string(e.state) +
                 " out of range");
      if (std::isnan(e.weight) || e.weight == -kLogZero)
        Fail(ErrorKind::kInvalidGraph, std::string(what) + " weight invalid");
      any = any || e.weight != kLogZero;
    }
    if (!any)
      Fail(ErrorKind::kInvalidGraph,
           std::string("no ") + what + " entry with non-zero weight");
  };
  check_entries(g.starts, "start");
  check_entries(g.finals, "final");
  int32_t prev = -1;
  for (const Readout &r : g.readouts) {
    if (r.arc < 0 || r.arc >= static_cast<int32_t>(g.arcs.size()) ||
        r.arc <= prev)
      Fail(ErrorKind::kInvalidGraph,
           "readout arc index " + std::to_string(r.arc) + " invalid");
    if (r.phone <= 0)
      Fail(ErrorKind::kInvalidGraph, "readout phone must be positive");
    prev = r.arc;
  }
}

WeightedGraph Trim(const WeightedGraph &g) {
  Validate(g);
  std::vector<char> accessible(g.num_states, 0), coaccessible(g.num_states, 0);
  std::vector<std::vector<int32_t>> out(g.num_states), in(g.num_states);
  for (int32_t a = 0; a < static_cast<int32_t>(g.arcs.size()); a++) {
    if (g.arcs[a].weight == kLogZero) continue;
    out[g.arcs[a].src].push_back(a);
    in[g.arcs[a].dst].push_back(a);
  }
  std::vector<StateId> stack;
  for (const StateWeight &s : g.starts)
    if (s.weight != kLogZero && !accessible[s.state]) {
      accessible[s.state] = 1;
      stack.push_back(s.state);
    }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (int32_t a : out[s]) {
      StateId d = g.arcs[a].dst;
      if (!accessible[d]) {
        accessible[d] = 1;
        stack.push_back(d);
      }
    }
  }
  for (const StateWeight &f : g.finals)
    if (f.weight != kLogZero && !coaccessible[f.state]) {
      coaccessible[f.state] = 1;
      stack.push_back(f.state);
    }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (int32_t a : in[s]) {
      StateId src = g.arcs[a].src;
      if (!coaccessible[src]) {
        coaccessible[src] = 1;
        stack.push_back(src);
      }
    }
  }

  std::vector<StateId> remap(g.num_states, -1);
  WeightedGraph result;
  result.semantics = g.semantics;
  for (StateId s = 0; s < g.num_states; s++)
    if (accessible[s] && coaccessible[s]) remap[s] = result.num_states++;
  if (result.num_states == 0)
    Fail(ErrorKind::kEmptyGraph, "no start-to-final path");

  std::vector<int32_t> arc_remap(g.arcs.size(), -1);
  for (size_t a = 0; a < g.arcs.size(); a++) {
    const Arc &arc = g.arcs[a];
    if (arc.weight == kLogZero || remap[arc.src] < 0 || remap[arc.dst] < 0)
      continue;
    arc_remap[a] = static_cast<int32_t>(result.arcs.size());
    result.AddArc(remap[arc.src], remap[arc.dst], arc.label, arc.weight);
  }
  for (const StateWeight &s : g.starts)
    if (s.weight != kLogZero && remap[s.state] >= 0)
      result.starts.push_back({remap[s.state], s.weight});
  for (const StateWeight &f : g.finals)
    if (f.weight != kLogZero && remap[f.state] >= 0)
      result.finals.push_back({remap[f.state], f.weight});
  for (const Readout &r : g.readouts)
    if (arc_remap[r.arc] >= 0) result.readouts.push_back({arc_remap[r.arc], r.phone});
  return result;
}

bool IsAcyclic(const WeightedGraph &g) {
  return g.num_states == 0 || !TopoSort(g, OutArcs(g)).empty();
}

double TotalWeight(const WeightedGraph &g, std::optional<int32_t> max_arcs) {
  Validate(g);
  std::vector<double> start(g.num_states, kLogZero), final(g.num_states, kLogZero);
  for (const StateWeight &s : g.starts) start[s.state] = LogAdd(start[s.state], s.weight);
  for (const StateWeight &f : g.finals) final[f.state] = LogAdd(final[f.state], f.weight);

  auto out = OutArcs(g);
  std::vector<StateId> order = TopoSort(g, out);
  if (!order.empty()) {
    std::vector<double> alpha = start;
    LogSumAccumulator total;
    for (StateId s : order) {
      if (alpha[s] == kLogZero) continue;
      total.Add(alpha[s] + final[s]);
      for (int32_t a : out[s]) {
        const Arc &arc = g.arcs[a];
        alpha[arc.dst] = LogAdd(alpha[arc.dst], alpha[s] + arc.weight);
      }
    }
    return total.Value();
  }
  if (!max_arcs)
    Fail(ErrorKind::kCyclicWithoutBound,
         "graph is cyclic and no path-length bound was given");
  // Layered sum over paths with exactly n arcs, n = 0..max_arcs.
  std::vector<double> alpha = start, next(g.num_states);
  LogSumAccumulator total;
  for (int32_t n = 0;; n++) {
    for (StateId s = 0; s < g.num_states; s++) total.Add(alpha[s] + final[s]);
    if (n == *max_arcs) break;
    std::fill(next.begin(), next.end(), kLogZero);
    for (const Arc &arc : g.arcs)
      if (alpha[arc.src] != kLogZero && arc.weight != kLogZero)
        next[arc.dst] = LogAdd(next[arc.dst], alpha[arc.src] + arc.weight);
    alpha.swap(next);
  }
  return total.Value();
}

int32_t NumPdfs(const WeightedGraph &g) {
  Label max_label = kEpsilon;
  for (const Arc &arc : g.arcs) max_label = std::max(max_label, arc.label);
  return max_label == kEpsilon ? 0 : LabelToPdf(max_label) + 1;
}

std::vector<StateId> EpsilonTopologicalOrder(const WeightedGraph &g) {
  std::vector<StateId> order = TopoSort(g, OutArcs(g, /*eps_only=*/true));
  if (order.empty() && g.num_states > 0)
    Fail(ErrorKind::kEpsilonCycle, "epsilon arcs form a cycle");
  return order;
}

std::string FormatDouble(double x) {
  if (x == kLogZero) return "-inf";
  if (x == -kLogZero) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> ParseDouble(std::string_view s) {
  if (s == "-inf") return kLogZero;
  if (s == "inf") return -kLogZero;
  double value = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string WriteGraph(const WeightedGraph &g) {
  std::string out = "WFSA v1 " + std::to_string(g.num_states) + " " +
                    std::string(LabelSemanticsName(g.semantics)) + "\n";
  for (const Arc &arc : g.arcs)
    out += "A " + std::to_string(arc.src) + " " + std::to_string(arc.dst) + " " +
           std::to_string(arc.label) + " " + FormatDouble(arc.weight) + "\n";
  for (const StateWeight &s : g.starts)
    out += "S " + std::to_string(s.state) + " " + FormatDouble(s.weight) + "\n";
  for (const StateWeight &f : g.finals)
    out += "F " + std::to_string(f.state) + " " + FormatDouble(f.weight) + "\n";
  for (const Readout &r : g.readouts)
    out += "R " + std::to_string(r.arc) + " " + std::to_string(r.phone) + "\n";
  return out;
}

namespace {

[[noreturn]] void ParseFail(int line_no, const std::string &msg) {
  Fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + msg);
}

int32_t ParseInt(std::string_view s, int line_no) {
  int32_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    ParseFail(line_no, "expected integer, got '" + std::string(s) + "'");
  return v;
}

double ParseWeight(std::string_view s, int line_no) {
  auto v = ParseDouble(s);
  if (!v || std::isnan(*v) || *v == -kLogZero)
    ParseFail(line_no, "bad weight '" + std::string(s) + "'");
  return *v;
}

}  // namespace

WeightedGraph ReadGraph(std::string_view text) {
  WeightedGraph g;
  int line_no = 0;
  bool have_header = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    line_no++;
    auto f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (!have_header) {
      if (f.size() != 4 || f[0] != "WFSA" || f[1] != "v1")
        ParseFail(line_no, "expected header 'WFSA v1 <num_states> <semantics>'");
      g.num_states = ParseInt(f[2], line_no);
      if (g.num_states <= 0) ParseFail(line_no, "num_states must be positive");
      if (f[3] == "pdf-id") g.semantics = LabelSemantics::kPdfId;
      else if (f[3] == "phone-id") g.semantics = LabelSemantics::kPhoneId;
      else ParseFail(line_no, "unknown label semantics '" + std::string(f[3]) + "'");
      have_header = true;
      continue;
    }
    auto check_state = [&](StateId s) {
      if (s < 0 || s >= g.num_states)
        ParseFail(line_no, "state " + std::to_string(s) + " out of range (" +
                               std::to_string(g.num_states) + " states)");
      return s;
    };
    if (f[0] == "A" && f.size() == 5) {
      Arc arc;
      arc.src = check_state(ParseInt(f[1], line_no));
      arc.dst = check_state(ParseInt(f[2], line_no));
      arc.label = ParseInt(f[3], line_no);
      if (arc.label < 0) ParseFail(line_no, "negative label");
      arc.weight = ParseWeight(f[4], line_no);
      g.arcs.push_back(arc);
    } else if ((f[0] == "S" || f[0] == "F") && f.size() == 3) {
      StateWeight e{check_state(ParseInt(f[1], line_no)), ParseWeight(f[2], line_no)};
      (f[0] == "S" ? g.starts : g.finals).push_back(e);
    } else if (f[0] == "R" && f.size() == 3) {
      g.readouts.push_back({ParseInt(f[1], line_no), ParseInt(f[2], line_no)});
    } else {
      ParseFail(line_no, "unrecognized record '" + std::string(line) + "'");
    }
  }
  if (!have_header) ParseFail(line_no, "missing header");
  try {
    Validate(g);
  } catch (const Error &e) {
    Fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + e.detail());
  }
  return g;
}

}  // namespace xlmmi
