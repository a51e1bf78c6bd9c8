/*
 * Copyright 2026 The blindspot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the blindspot shared library.
 *
 * Objects are opaque handles created by bs_*_load / bs_*_make functions and
 * released by the matching bs_*_free. Every fallible call returns a
 * bs_status; on failure bs_last_error() holds a message for the calling
 * thread. Strings returned through char** are owned by the caller and
 * released with bs_string_free.
 */

#ifndef BLINDSPOT_H
#define BLINDSPOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bs_status {
  BS_OK = 0,
  BS_ERR_VALIDATION = 1, /* bad data or bad arguments */
  BS_ERR_IO = 2          /* unreadable or unwritable paths */
} bs_status;

typedef enum bs_regime { BS_ON_POLICY = 0, BS_OFF_POLICY = 1 } bs_regime;

typedef enum bs_corpus_mode {
  BS_BOTH_CANDIDATES = 0,
  BS_CHOSEN_ONLY = 1
} bs_corpus_mode;

typedef enum bs_format { BS_FORMAT_TEXT = 0, BS_FORMAT_STRUCTURED = 1 } bs_format;

typedef struct bs_distribution bs_distribution;
typedef struct bs_kernel bs_kernel;
typedef struct bs_joint bs_joint;
typedef struct bs_loss bs_loss;
typedef struct bs_corpus bs_corpus;

const char* bs_version(void);

/* Message for the most recent failure on this thread; empty if none. */
const char* bs_last_error(void);

void bs_string_free(char* s);

/* ---- object lifecycle -------------------------------------------------- */

bs_status bs_distribution_load(const char* path, bs_distribution** out);
bs_status bs_distribution_make(const char* const* labels, const double* weights,
                               size_t n, int renormalize, bs_distribution** out);
void bs_distribution_free(bs_distribution* d);

bs_status bs_kernel_load(const char* path, bs_kernel** out);
void bs_kernel_free(bs_kernel* k);

bs_status bs_loss_load(const char* path, bs_loss** out);
void bs_loss_free(bs_loss* l);

bs_status bs_corpus_load(const char* path, bs_corpus** out);
void bs_corpus_free(bs_corpus* c);

bs_status bs_joint_make(const bs_distribution* rho, const bs_kernel* k,
                        bs_regime regime, bs_joint** out);
bs_status bs_corpus_to_offpolicy(const bs_corpus* corpus, const bs_distribution* rho,
                                 bs_corpus_mode mode, bs_joint** out);
void bs_joint_free(bs_joint* j);

/* ---- scalar queries ---------------------------------------------------- */

bs_status bs_tv_joint(const bs_joint* p, const bs_joint* q, double* out);
bs_status bs_risk(const bs_joint* j, const bs_loss* loss, double* out);

/* passed is 1/0; when it is 0, *diagnostics (if non-NULL) lists every
 * offending prompt with both weights. */
bs_status bs_check_equal_marginal(const bs_joint* p, const bs_joint* q, double tol,
                                  int* passed, char** diagnostics);

/* ---- reports ------------------------------------------------------------ */

/* q_mode names how Q was constructed and is echoed in the report header. */
bs_status bs_audit_exact(const bs_joint* p, const bs_joint* q, const bs_loss* loss,
                         const char* q_mode, bs_format format, char** report);

bs_status bs_audit_sampled(const bs_joint* p, const bs_joint* q, const bs_loss* loss,
                           uint64_t n, uint64_t seed, double confidence,
                           const char* q_mode, bs_format format, char** report);

/* The shipped blind-spot demo; suppression in [0, 1] scales how thoroughly
 * the corpus construction removes the penalized behavior. */
bs_status bs_demo(uint64_t seed, double suppression, bs_format format, char** report);

/* judge_names may be NULL to use every built-in judge. */
bs_status bs_classify(const bs_corpus* corpus, const char* const* judge_names,
                      size_t n_judges, bs_format format, char** report);

/* n draws from a joint law, serialized in the samples line format. */
bs_status bs_sample(const bs_joint* j, uint64_t n, uint64_t seed, char** records);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BLINDSPOT_H */
