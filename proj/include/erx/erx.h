/*
 * Copyright 2026 The erx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the erx explanation engine.
 *
 * Every fallible call returns an erx_status. On failure the message of the
 * most recent error on the calling thread is available from
 * erx_last_error() until the next failing call on that thread. Strings
 * returned through `char** out` parameters are owned by the caller and must
 * be released with erx_string_free().
 *
 * Handles may be shared across threads. A classifier handle memoizes scores
 * for its lifetime and serializes access to bridged classifiers.
 */

#ifndef ERX_ERX_H_
#define ERX_ERX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERX_API __declspec(dllexport)
#else
#define ERX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erx_status {
  ERX_OK = 0,
  ERX_INVALID_ARGUMENT = 1,
  ERX_LOAD_ERROR = 2,
  ERX_PARSE_ERROR = 3,
  ERX_TRANSPORT_ERROR = 4,
  ERX_PROTOCOL_ERROR = 5,
  ERX_EXPLANATION_UNAVAILABLE = 6,
  ERX_ORACLE_ERROR = 7,
  ERX_INTERNAL_ERROR = 8
} erx_status;

typedef enum erx_format { ERX_FORMAT_JSON = 0, ERX_FORMAT_MARKDOWN = 1 } erx_format;

typedef struct erx_dataset erx_dataset;
typedef struct erx_classifier erx_classifier;

typedef struct erx_config {
  int tau;                 /* triangles in all, even and >= 2 (default 100) */
  uint64_t seed;           /* default 0 */
  int augment;             /* token-drop augmentation on shortage (default 1) */
  int prune;               /* monotone propagation (default 1) */
  size_t cf_cap;           /* counterfactuals kept per explanation (default 10) */
  int global_flip_count;   /* saliency over the flips of both sides (default 0) */
  int jobs;                /* worker threads (default 1) */
  erx_format format;       /* output format where both are offered (default JSON) */
} erx_config;

ERX_API const char* erx_version(void);
ERX_API const char* erx_status_name(erx_status status);
ERX_API const char* erx_last_error(void);
ERX_API void erx_string_free(char* text);

ERX_API void erx_config_init(erx_config* config);

/* Loads <directory>/tableA.csv, tableB.csv and the train/valid/test splits. */
ERX_API erx_status erx_dataset_load(const char* directory, erx_dataset** out);
ERX_API void erx_dataset_free(erx_dataset* dataset);
/* JSON with record counts, schemas and split sizes. */
ERX_API erx_status erx_dataset_summary(const erx_dataset* dataset, char** out);

/*
 * Resolves a selector to a JSON array of
 * {"name","split","left","right","label"} objects. Selectors are
 * "<split>:<row>", "id:<left id>,<right id>" and "all:<split>".
 */
ERX_API erx_status erx_select_pairs(const erx_dataset* dataset, const char* selector,
                                    char** out);

/*
 * Classifier specs:
 *   "reference"       built-in token-Jaccard matcher
 *   "bridge:<cmd>"    adapter child process started with /bin/sh -c <cmd>
 *   "http:<url>"      adapter served over HTTP POST at <url>
 * Bridged classifiers are connected (handshake included) before returning.
 */
ERX_API erx_status erx_classifier_create(const char* spec, erx_classifier** out);
/* As erx_classifier_create with an explicit bridge reply timeout and retry
 * count (both ignored for "reference"). */
ERX_API erx_status erx_classifier_create_ex(const char* spec, int timeout_ms, int retries,
                                            erx_classifier** out);
ERX_API void erx_classifier_free(erx_classifier* classifier);
ERX_API erx_status erx_classifier_score(erx_classifier* classifier, const erx_dataset* dataset,
                                        const char* left_id, const char* right_id,
                                        double* out);

/*
 * Explains the prediction for one pair. On ERX_EXPLANATION_UNAVAILABLE,
 * `out` still receives a JSON document with the error and the triangle
 * diagnostics. A non-null `masking_ks` of length `num_ks` appends the masking
 * analysis (per-attribute effect and Aggr@k) to the report.
 */
ERX_API erx_status erx_explain(erx_classifier* classifier, const erx_dataset* dataset,
                               const char* left_id, const char* right_id,
                               const erx_config* config, const int* masking_ks,
                               size_t num_ks, char** out);

/* Triangle acquisition report for one pair (JSON). */
ERX_API erx_status erx_triangles(erx_classifier* classifier, const erx_dataset* dataset,
                                 const char* left_id, const char* right_id,
                                 const erx_config* config, char** out);

/* Explains every pair of a split and aggregates the quality metrics. */
ERX_API erx_status erx_evaluate(erx_classifier* classifier, const erx_dataset* dataset,
                                const char* split, const erx_config* config, char** out);

/* Pruned versus exhaustive lattice tagging over a split. */
ERX_API erx_status erx_audit(erx_classifier* classifier, const erx_dataset* dataset,
                             const char* split, const erx_config* config, char** out);

#ifdef __cplusplus
}
#endif

#endif /* ERX_ERX_H_ */
