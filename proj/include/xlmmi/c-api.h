// include/xlmmi/c-api.h

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

/* Plain C entry points for loading compiled graphs and evaluating the
 * LF-MMI loss from another runtime. All functions are thread-safe; a graph
 * handle may be shared by concurrent calls. */
#ifndef XLMMI_C_API_H_
#define XLMMI_C_API_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lf_graph lf_graph;

/* Returns NULL on failure; lf_last_error() then describes it. */
lf_graph *lf_load_graph(const char *path);
void lf_release_graph(lf_graph *graph);

/* Number of pdf-ids the graph uses (largest pdf-id + 1). */
int32_t lf_graph_num_pdfs(const lf_graph *graph);

/* `emissions` and `grad` are row-major T x P float32 buffers; `grad` may be
 * NULL. Returns 0 on success, otherwise a positive error code, with the
 * outputs untouched. */
int lf_loss_and_grad(const lf_graph *num, const lf_graph *den, const float *emissions,
                     int32_t num_frames, int32_t num_pdfs, double *loss, double *num_logprob,
                     double *den_logprob, float *grad);

/* Message of the calling thread's most recent failure ("" if none). */
const char *lf_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* XLMMI_C_API_H_ */
