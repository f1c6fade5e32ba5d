// src/c-api.cc

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

#include "xlmmi/c-api.h"

#include <string>

#include "xlmmi/error.h"
#include "xlmmi/lfmmi.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/wfsa.h"

struct lf_graph {
  xlmmi::WeightedGraph graph;
};

namespace {

thread_local std::string last_error;

int Record(const xlmmi::Error &e) {
  last_error = e.what();
  return static_cast<int>(e.kind()) + 1;
}

}  // namespace

extern "C" {

lf_graph *lf_load_graph(const char *path) {
  try {
    if (path == nullptr) xlmmi::Fail(xlmmi::ErrorKind::kIo, "null path");
    std::string text = xlmmi::ReadFile(path);
    try {
      auto *g = new lf_graph{xlmmi::ReadGraph(text)};
      last_error.clear();
      return g;
    } catch (const xlmmi::Error &e) {
      xlmmi::FailWithContext(e, path);
    }
  } catch (const xlmmi::Error &e) {
    Record(e);
  } catch (const std::exception &e) {
    last_error = e.what();
  }
  return nullptr;
}

void lf_release_graph(lf_graph *graph) { delete graph; }

int32_t lf_graph_num_pdfs(const lf_graph *graph) {
  return graph == nullptr ? 0 : xlmmi::NumPdfs(graph->graph);
}

int lf_loss_and_grad(const lf_graph *num, const lf_graph *den, const float *emissions,
                     int32_t num_frames, int32_t num_pdfs, double *loss, double *num_logprob,
                     double *den_logprob, float *grad) {
  try {
    if (num == nullptr || den == nullptr || emissions == nullptr || loss == nullptr ||
        num_logprob == nullptr || den_logprob == nullptr)
      xlmmi::Fail(xlmmi::ErrorKind::kInvalidParameter, "null argument");
    if (num_frames < 1 || num_pdfs < 1)
      xlmmi::Fail(xlmmi::ErrorKind::kShapeMismatch, "emission buffer must be at least 1 x 1");
    xlmmi::Matrix e(num_frames, num_pdfs);
    for (int64_t i = 0; i < e.size(); i++) e.data()[i] = emissions[i];
    xlmmi::LossResult r = xlmmi::LfmmiLoss(num->graph, den->graph, e);
    *loss = r.loss;
    *num_logprob = r.num_logprob;
    *den_logprob = r.den_logprob;
    if (grad != nullptr)
      for (int64_t i = 0; i < r.grad.size(); i++) grad[i] = static_cast<float>(r.grad.data()[i]);
    last_error.clear();
    return 0;
  } catch (const xlmmi::Error &e) {
    return Record(e);
  } catch (const std::exception &e) {
    last_error = e.what();
    return static_cast<int>(xlmmi::ErrorKind::kIo) + 2;
  }
}

const char *lf_last_error(void) { return last_error.c_str(); }

}  // extern "C"
