// src/lfmmi.cc

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

#include "xlmmi/lfmmi.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <exception>

#include "xlmmi/error.h"

namespace xlmmi {

namespace {

// Below this many states the per-frame loops run serially; thread start-up
// costs more than the work.
constexpr int32_t kParallelStateThreshold = 4096;
constexpr int32_t kParallelFrameThreshold = 16;

void CheckInputs(const WeightedGraph &graph, const EmissionMatrix &emissions) {
  Validate(graph);
  if (graph.semantics != LabelSemantics::kPdfId)
    Fail(ErrorKind::kInvalidGraph, "forward-backward needs a pdf-id labeled graph");
  if (emissions.rows() < 1) Fail(ErrorKind::kShapeMismatch, "emission matrix has no frames");
  const int32_t num_pdfs = NumPdfs(graph);
  if (num_pdfs > emissions.cols())
    Fail(ErrorKind::kLabelOutOfRange,
         "graph uses pdf-id " + std::to_string(num_pdfs - 1) + " but emissions have " +
             std::to_string(emissions.cols()) + " columns");
}

struct Endpoints {
  std::vector<double> start, final;
};

Endpoints GatherEndpoints(const WeightedGraph &g) {
  Endpoints e{std::vector<double>(g.num_states, kLogZero),
              std::vector<double>(g.num_states, kLogZero)};
  for (const StateWeight &s : g.starts) e.start[s.state] = LogAdd(e.start[s.state], s.weight);
  for (const StateWeight &f : g.finals) e.final[f.state] = LogAdd(e.final[f.state], f.weight);
  return e;
}

// Compressed arc lists for the parallel kernels.
struct ArcIndex {
  // Emitting arcs grouped by destination and by source (CSR offsets).
  std::vector<int32_t> in_offsets, in_arcs, out_offsets, out_arcs;
  // Epsilon arcs ordered by the topological position of their source.
  std::vector<int32_t> eps_forward;
  std::vector<int32_t> emitting;
};

ArcIndex BuildIndex(const WeightedGraph &g) {
  ArcIndex index;
  const int32_t num_arcs = static_cast<int32_t>(g.arcs.size());
  index.in_offsets.assign(g.num_states + 1, 0);
  index.out_offsets.assign(g.num_states + 1, 0);
  for (const Arc &arc : g.arcs) {
    if (arc.label == kEpsilon) continue;
    index.in_offsets[arc.dst + 1]++;
    index.out_offsets[arc.src + 1]++;
  }
  for (int32_t s = 0; s < g.num_states; s++) {
    index.in_offsets[s + 1] += index.in_offsets[s];
    index.out_offsets[s + 1] += index.out_offsets[s];
  }
  index.in_arcs.resize(index.in_offsets.back());
  index.out_arcs.resize(index.out_offsets.back());
  std::vector<int32_t> in_fill(index.in_offsets.begin(), index.in_offsets.end() - 1);
  std::vector<int32_t> out_fill(index.out_offsets.begin(), index.out_offsets.end() - 1);
  for (int32_t a = 0; a < num_arcs; a++) {
    const Arc &arc = g.arcs[a];
    if (arc.label == kEpsilon) continue;
    index.in_arcs[in_fill[arc.dst]++] = a;
    index.out_arcs[out_fill[arc.src]++] = a;
    index.emitting.push_back(a);
  }
  std::vector<StateId> order = EpsilonTopologicalOrder(g);
  std::vector<std::vector<int32_t>> eps_out(g.num_states);
  for (int32_t a = 0; a < num_arcs; a++)
    if (g.arcs[a].label == kEpsilon) eps_out[g.arcs[a].src].push_back(a);
  for (StateId s : order)
    for (int32_t a : eps_out[s]) index.eps_forward.push_back(a);
  return index;
}

// Relaxes epsilon arcs in topological order of their sources.
void ForwardClosure(const WeightedGraph &g, const std::vector<int32_t> &eps_arcs,
                    double *alpha) {
  for (int32_t a : eps_arcs) {
    const Arc &arc = g.arcs[a];
    if (alpha[arc.src] == kLogZero) continue;
    alpha[arc.dst] = LogAdd(alpha[arc.dst], alpha[arc.src] + arc.weight);
  }
}

void BackwardClosure(const WeightedGraph &g, const std::vector<int32_t> &eps_arcs,
                     double *beta) {
  for (auto it = eps_arcs.rbegin(); it != eps_arcs.rend(); ++it) {
    const Arc &arc = g.arcs[*it];
    if (beta[arc.dst] == kLogZero) continue;
    beta[arc.src] = LogAdd(beta[arc.src], arc.weight + beta[arc.dst]);
  }
}

double LogSumWith(const std::vector<double> &a, const double *b, int32_t n) {
  LogSumAccumulator acc;
  for (int32_t s = 0; s < n; s++)
    if (a[s] != kLogZero && b[s] != kLogZero) acc.Add(a[s] + b[s]);
  return acc.Value();
}

ForwardBackwardResult LogSpaceForwardBackward(const WeightedGraph &graph,
                                              const EmissionMatrix &emissions,
                                              const ArcIndex &index, const Endpoints &ends) {
  const int32_t num_frames = static_cast<int32_t>(emissions.rows());
  const int32_t num_states = graph.num_states;
  const auto &arcs = graph.arcs;

  // alpha(t, s): paths that consumed t frames and sit at s after the
  // epsilon closure; beta(t, s): completions from s at boundary t.
  Matrix alpha(num_frames + 1, num_states), beta(num_frames + 1, num_states);
  std::copy(ends.start.begin(), ends.start.end(), alpha.row(0).data());
  ForwardClosure(graph, index.eps_forward, alpha.row(0).data());
  const bool parallel_states = num_states >= kParallelStateThreshold;
  for (int32_t t = 0; t < num_frames; t++) {
    const double *prev = alpha.row(t).data();
    double *cur = alpha.row(t + 1).data();
    const double *frame = emissions.row(t).data();
#pragma omp parallel for if (parallel_states) schedule(static)
    for (StateId d = 0; d < num_states; d++) {
      LogSumAccumulator acc;
      for (int32_t i = index.in_offsets[d]; i < index.in_offsets[d + 1]; i++) {
        const Arc &arc = arcs[index.in_arcs[i]];
        if (prev[arc.src] == kLogZero) continue;
        acc.Add(prev[arc.src] + arc.weight + frame[LabelToPdf(arc.label)]);
      }
      cur[d] = acc.Value();
    }
    ForwardClosure(graph, index.eps_forward, cur);
  }

  std::copy(ends.final.begin(), ends.final.end(), beta.row(num_frames).data());
  BackwardClosure(graph, index.eps_forward, beta.row(num_frames).data());
  for (int32_t t = num_frames - 1; t >= 0; t--) {
    const double *next = beta.row(t + 1).data();
    double *cur = beta.row(t).data();
    const double *frame = emissions.row(t).data();
#pragma omp parallel for if (parallel_states) schedule(static)
    for (StateId s = 0; s < num_states; s++) {
      LogSumAccumulator acc;
      for (int32_t i = index.out_offsets[s]; i < index.out_offsets[s + 1]; i++) {
        const Arc &arc = arcs[index.out_arcs[i]];
        if (next[arc.dst] == kLogZero) continue;
        acc.Add(arc.weight + frame[LabelToPdf(arc.label)] + next[arc.dst]);
      }
      cur[s] = acc.Value();
    }
    BackwardClosure(graph, index.eps_forward, cur);
  }

  ForwardBackwardResult result;
  result.logprob = LogSumWith(ends.final, alpha.row(num_frames).data(), num_states);
  result.backward_logprob = LogSumWith(ends.start, beta.row(0).data(), num_states);
  result.occupancy = Matrix::Zero(num_frames, emissions.cols());
  result.accepted = result.logprob != kLogZero;
  if (!result.accepted) return result;

  const double total = result.logprob;
#pragma omp parallel for if (num_frames >= kParallelFrameThreshold) schedule(static)
  for (int32_t t = 0; t < num_frames; t++) {
    const double *a = alpha.row(t).data();
    const double *b = beta.row(t + 1).data();
    const double *frame = emissions.row(t).data();
    double *gamma = result.occupancy.row(t).data();
    for (int32_t idx : index.emitting) {
      const Arc &arc = arcs[idx];
      if (a[arc.src] == kLogZero || b[arc.dst] == kLogZero) continue;
      const int32_t pdf = LabelToPdf(arc.label);
      gamma[pdf] += std::exp(a[arc.src] + arc.weight + frame[pdf] + b[arc.dst] - total);
    }
  }
  return result;
}

// Terms below this are treated as a possible loss of precision.
constexpr double kTinyTerm = 1e-290;

// Forward-backward in probability space with one rescaling per frame. Each
// frame's emissions are shifted by their maximum before exponentiation.
// Returns nullopt as soon as a product of non-zero factors drops below
// kTinyTerm, or when no path survives; the caller then redoes the work in
// the log semiring, so the result never depends on a silent underflow.
std::optional<ForwardBackwardResult> ScaledForwardBackward(const WeightedGraph &graph,
                                                           const EmissionMatrix &emissions,
                                                           const ArcIndex &index,
                                                           const Endpoints &ends) {
  const int32_t num_frames = static_cast<int32_t>(emissions.rows());
  const int32_t num_states = graph.num_states;
  const int32_t num_pdfs = static_cast<int32_t>(emissions.cols());
  const auto &arcs = graph.arcs;
  const bool parallel_states = num_states >= kParallelStateThreshold;

  std::vector<double> arc_weight(arcs.size());
  std::vector<int32_t> arc_pdf(arcs.size(), -1);
  for (size_t a = 0; a < arcs.size(); a++) {
    arc_weight[a] = std::exp(arcs[a].weight);
    if (arcs[a].label != kEpsilon) arc_pdf[a] = LabelToPdf(arcs[a].label);
  }
  Matrix emit(num_frames, num_pdfs);
  std::vector<double> emit_shift(num_frames);
  for (int32_t t = 0; t < num_frames; t++) {
    emit_shift[t] = emissions.row(t).maxCoeff();
    emit.row(t) = (emissions.row(t).array() - emit_shift[t]).exp();
  }

  // Start and final weights outside the representable range go to the
  // log-space kernel as well.
  auto endpoint_weights = [](const std::vector<double> &logs, std::vector<double> *out) {
    out->resize(logs.size());
    for (size_t s = 0; s < logs.size(); s++) {
      (*out)[s] = std::exp(logs[s]);
      if (logs[s] != kLogZero && !((*out)[s] >= kTinyTerm && std::isfinite((*out)[s])))
        return false;
    }
    return true;
  };
  std::vector<double> start, final;
  if (!endpoint_weights(ends.start, &start) || !endpoint_weights(ends.final, &final))
    return std::nullopt;

  auto closure_ok = [&](double *v, bool forward) {
    bool ok = true;
    if (forward) {
      for (int32_t a : index.eps_forward) {
        const double x = v[arcs[a].src];
        if (x == 0.0) continue;
        const double term = x * arc_weight[a];
        ok &= term >= kTinyTerm;
        v[arcs[a].dst] += term;
      }
    } else {
      for (auto it = index.eps_forward.rbegin(); it != index.eps_forward.rend(); ++it) {
        const double x = v[arcs[*it].dst];
        if (x == 0.0) continue;
        const double term = arc_weight[*it] * x;
        ok &= term >= kTinyTerm;
        v[arcs[*it].src] += term;
      }
    }
    return ok;
  };
  // Divides `v` by its maximum and returns the log of that maximum, or
  // nullopt when every entry is zero.
  auto rescale = [&](double *v) -> std::optional<double> {
    double m = 0.0;
    for (int32_t s = 0; s < num_states; s++) m = std::max(m, v[s]);
    if (m == 0.0 || !std::isfinite(m)) return std::nullopt;
    const double inv = 1.0 / m;
    for (int32_t s = 0; s < num_states; s++) v[s] *= inv;
    return std::log(m);
  };

  // alpha(t, s) = A(t, s) exp(alpha_log[t]), and likewise for beta.
  Matrix A(num_frames + 1, num_states), B(num_frames + 1, num_states);
  std::vector<double> alpha_log(num_frames + 1), beta_log(num_frames + 1);
  for (int32_t s = 0; s < num_states; s++) A(0, s) = start[s];
  if (!closure_ok(A.row(0).data(), true)) return std::nullopt;
  auto scale = rescale(A.row(0).data());
  if (!scale) return std::nullopt;
  alpha_log[0] = *scale;
  for (int32_t t = 0; t < num_frames; t++) {
    const double *prev = A.row(t).data();
    double *cur = A.row(t + 1).data();
    const double *frame = emit.row(t).data();
    bool ok = true;
#pragma omp parallel for if (parallel_states) schedule(static) reduction(&& : ok)
    for (StateId d = 0; d < num_states; d++) {
      double sum = 0.0;
      for (int32_t i = index.in_offsets[d]; i < index.in_offsets[d + 1]; i++) {
        const int32_t a = index.in_arcs[i];
        const double x = prev[arcs[a].src];
        if (x == 0.0) continue;
        const double term = x * arc_weight[a] * frame[arc_pdf[a]];
        ok = ok && term >= kTinyTerm;
        sum += term;
      }
      cur[d] = sum;
    }
    if (!ok || !closure_ok(cur, true)) return std::nullopt;
    scale = rescale(cur);
    if (!scale) return std::nullopt;
    alpha_log[t + 1] = alpha_log[t] + emit_shift[t] + *scale;
  }

  for (int32_t s = 0; s < num_states; s++) B(num_frames, s) = final[s];
  if (!closure_ok(B.row(num_frames).data(), false)) return std::nullopt;
  scale = rescale(B.row(num_frames).data());
  if (!scale) return std::nullopt;
  beta_log[num_frames] = *scale;
  for (int32_t t = num_frames - 1; t >= 0; t--) {
    const double *next = B.row(t + 1).data();
    double *cur = B.row(t).data();
    const double *frame = emit.row(t).data();
    bool ok = true;
#pragma omp parallel for if (parallel_states) schedule(static) reduction(&& : ok)
    for (StateId s = 0; s < num_states; s++) {
      double sum = 0.0;
      for (int32_t i = index.out_offsets[s]; i < index.out_offsets[s + 1]; i++) {
        const int32_t a = index.out_arcs[i];
        const double x = next[arcs[a].dst];
        if (x == 0.0) continue;
        const double term = arc_weight[a] * frame[arc_pdf[a]] * x;
        ok = ok && term >= kTinyTerm;
        sum += term;
      }
      cur[s] = sum;
    }
    if (!ok || !closure_ok(cur, false)) return std::nullopt;
    scale = rescale(cur);
    if (!scale) return std::nullopt;
    beta_log[t] = beta_log[t + 1] + emit_shift[t] + *scale;
  }

  double forward_sum = 0.0, backward_sum = 0.0;
  for (int32_t s = 0; s < num_states; s++) {
    forward_sum += A(num_frames, s) * final[s];
    backward_sum += start[s] * B(0, s);
  }
  if (!(forward_sum >= kTinyTerm) || !(backward_sum >= kTinyTerm)) return std::nullopt;

  ForwardBackwardResult result;
  result.accepted = true;
  result.logprob = alpha_log[num_frames] + std::log(forward_sum);
  result.backward_logprob = beta_log[0] + std::log(backward_sum);
  result.occupancy = Matrix::Zero(num_frames, num_pdfs);
  // Every accepted path emits exactly one pdf per frame, so each occupancy
  // row is normalised by its own total. That total equals
  // exp(logprob - alpha_log[t] - emit_shift[t] - beta_log[t + 1]); a tiny
  // value means the scaled products lost precision.
  bool ok = true;
#pragma omp parallel for if (num_frames >= kParallelFrameThreshold) schedule(static) \
    reduction(&& : ok)
  for (int32_t t = 0; t < num_frames; t++) {
    const double row_total = std::exp(result.logprob - alpha_log[t] - emit_shift[t] -
                                      beta_log[t + 1]);
    if (!(row_total >= 1e-200)) {
      ok = false;
      continue;
    }
    const double *a = A.row(t).data();
    const double *b = B.row(t + 1).data();
    const double *frame = emit.row(t).data();
    double *gamma = result.occupancy.row(t).data();
    for (int32_t idx : index.emitting) {
      const double x = a[arcs[idx].src], y = b[arcs[idx].dst];
      if (x == 0.0 || y == 0.0) continue;
      gamma[arc_pdf[idx]] += x * arc_weight[idx] * frame[arc_pdf[idx]] * y;
    }
    const double inv = 1.0 / row_total;
    for (int32_t p = 0; p < num_pdfs; p++) gamma[p] *= inv;
  }
  if (!ok) return std::nullopt;
  return result;
}

}  // namespace

ForwardBackwardResult ForwardBackward(const WeightedGraph &graph,
                                      const EmissionMatrix &emissions) {
  CheckInputs(graph, emissions);
  const ArcIndex index = BuildIndex(graph);
  const Endpoints ends = GatherEndpoints(graph);
  if (auto scaled = ScaledForwardBackward(graph, emissions, index, ends)) return *scaled;
  return LogSpaceForwardBackward(graph, emissions, index, ends);
}

ForwardBackwardResult ForwardBackwardReference(const WeightedGraph &graph,
                                               const EmissionMatrix &emissions) {
  CheckInputs(graph, emissions);
  const int32_t num_frames = static_cast<int32_t>(emissions.rows());
  const int32_t num_states = graph.num_states;
  const Endpoints ends = GatherEndpoints(graph);
  std::vector<StateId> order = EpsilonTopologicalOrder(graph);

  auto closure = [&](std::vector<double> &v, bool forward) {
    // Visit states in topological order (reverse for beta) and push mass
    // along each of their epsilon arcs.
    for (int32_t i = 0; i < num_states; i++) {
      StateId s = forward ? order[i] : order[num_states - 1 - i];
      for (const Arc &arc : graph.arcs) {
        if (arc.label != kEpsilon) continue;
        if (forward && arc.src == s)
          v[arc.dst] = LogAdd(v[arc.dst], LogMul(v[s], arc.weight));
        if (!forward && arc.src == s)
          v[s] = LogAdd(v[s], LogMul(arc.weight, v[arc.dst]));
      }
    }
  };

  std::vector<std::vector<double>> alpha(num_frames + 1), beta(num_frames + 1);
  alpha[0] = ends.start;
  closure(alpha[0], true);
  for (int32_t t = 0; t < num_frames; t++) {
    alpha[t + 1].assign(num_states, kLogZero);
    for (const Arc &arc : graph.arcs) {
      if (arc.label == kEpsilon) continue;
      double x = LogMul(LogMul(alpha[t][arc.src], arc.weight),
                        emissions(t, LabelToPdf(arc.label)));
      alpha[t + 1][arc.dst] = LogAdd(alpha[t + 1][arc.dst], x);
    }
    closure(alpha[t + 1], true);
  }
  beta[num_frames] = ends.final;
  closure(beta[num_frames], false);
  for (int32_t t = num_frames - 1; t >= 0; t--) {
    beta[t].assign(num_states, kLogZero);
    for (const Arc &arc : graph.arcs) {
      if (arc.label == kEpsilon) continue;
      double x = LogMul(LogMul(arc.weight, emissions(t, LabelToPdf(arc.label))),
                        beta[t + 1][arc.dst]);
      beta[t][arc.src] = LogAdd(beta[t][arc.src], x);
    }
    closure(beta[t], false);
  }

  ForwardBackwardResult result;
  result.logprob = result.backward_logprob = kLogZero;
  for (StateId s = 0; s < num_states; s++) {
    result.logprob = LogAdd(result.logprob, LogMul(alpha[num_frames][s], ends.final[s]));
    result.backward_logprob = LogAdd(result.backward_logprob, LogMul(ends.start[s], beta[0][s]));
  }
  result.occupancy = Matrix::Zero(num_frames, emissions.cols());
  result.accepted = result.logprob != kLogZero;
  if (!result.accepted) return result;
  for (int32_t t = 0; t < num_frames; t++)
    for (const Arc &arc : graph.arcs) {
      if (arc.label == kEpsilon) continue;
      const int32_t pdf = LabelToPdf(arc.label);
      double x = LogMul(LogMul(alpha[t][arc.src], arc.weight),
                        LogMul(emissions(t, pdf), beta[t + 1][arc.dst]));
      if (x != kLogZero) result.occupancy(t, pdf) += std::exp(x - result.logprob);
    }
  return result;
}

LossResult LfmmiLoss(const WeightedGraph &num, const WeightedGraph &den,
                     const EmissionMatrix &emissions) {
  ForwardBackwardResult num_fb = ForwardBackward(num, emissions);
  if (!num_fb.accepted)
    Fail(ErrorKind::kNumeratorPruned,
         "numerator has no path of " + std::to_string(emissions.rows()) + " frames");
  ForwardBackwardResult den_fb = ForwardBackward(den, emissions);
  if (!den_fb.accepted)
    Fail(ErrorKind::kNoAcceptingPath,
         "denominator has no path of " + std::to_string(emissions.rows()) + " frames");
  LossResult result;
  result.num_logprob = num_fb.logprob;
  result.den_logprob = den_fb.logprob;
  result.loss = den_fb.logprob - num_fb.logprob;
  result.grad = den_fb.occupancy - num_fb.occupancy;
  return result;
}

BatchLossResult BatchLoss(const std::vector<WeightedGraph> &nums, const WeightedGraph &den,
                          const std::vector<EmissionMatrix> &emissions) {
  if (nums.size() != emissions.size())
    Fail(ErrorKind::kLengthMismatch, std::to_string(nums.size()) + " numerators vs " +
                                         std::to_string(emissions.size()) + " emission matrices");
  const int32_t n = static_cast<int32_t>(nums.size());
  BatchLossResult batch;
  batch.utterances.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int32_t u = 0; u < n; u++) {
    try {
      batch.utterances[u] = LfmmiLoss(nums[u], den, emissions[u]);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kNumeratorPruned) errors[u] = std::current_exception();
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (int32_t u = 0; u < n; u++) {
    if (errors[u]) std::rethrow_exception(errors[u]);
    if (batch.utterances[u]) {
      batch.total_loss += batch.utterances[u]->loss;
    } else {
      batch.skipped.push_back(u);
    }
  }
  return batch;
}

namespace {

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; i++) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(std::string_view bytes, size_t offset) {
  uint32_t v = 0;
  for (int i = 0; i < 4; i++)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string WriteEmat(const Matrix &m) {
  std::string out = "EMAT";
  PutU32(&out, 1);
  PutU32(&out, static_cast<uint32_t>(m.rows()));
  PutU32(&out, static_cast<uint32_t>(m.cols()));
  out.reserve(out.size() + 4 * m.size());
  for (Eigen::Index r = 0; r < m.rows(); r++)
    for (Eigen::Index c = 0; c < m.cols(); c++) {
      float f = static_cast<float>(m(r, c));
      uint32_t bits;
      std::memcpy(&bits, &f, sizeof(bits));
      PutU32(&out, bits);
    }
  return out;
}

Matrix ReadEmat(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 4) != "EMAT")
    Fail(ErrorKind::kParse, "not an EMAT file (bad magic)");
  if (GetU32(bytes, 4) != 1)
    Fail(ErrorKind::kParse, "unsupported EMAT version " + std::to_string(GetU32(bytes, 4)));
  const uint64_t rows = GetU32(bytes, 8), cols = GetU32(bytes, 12);
  if (bytes.size() != 16 + 4 * rows * cols)
    Fail(ErrorKind::kParse, "EMAT payload size does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  Matrix m(rows, cols);
  size_t offset = 16;
  for (uint64_t r = 0; r < rows; r++)
    for (uint64_t c = 0; c < cols; c++, offset += 4) {
      uint32_t bits = GetU32(bytes, offset);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      if (!std::isfinite(f)) Fail(ErrorKind::kParse, "non-finite EMAT entry");
      m(r, c) = f;
    }
  return m;
}

}  // namespace xlmmi
