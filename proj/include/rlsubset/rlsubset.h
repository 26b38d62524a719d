// Copyright 2026 The rlsubset Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the rlsubset engine.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an rls_status; on
 * failure rls_last_error() describes the problem. The error message is
 * thread-local and stays valid until the next failing call on that thread.
 * Strings returned through char** out-parameters are released with
 * rls_string_free.
 */

#ifndef RLSUBSET_RLSUBSET_H_
#define RLSUBSET_RLSUBSET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RLSUBSET_BUILDING_LIBRARY)
#    define RLS_API __declspec(dllexport)
#  else
#    define RLS_API __declspec(dllimport)
#  endif
#else
#  define RLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rls_status {
  RLS_OK = 0,
  RLS_ERR_PARSE = 1,
  RLS_ERR_SCHEMA = 2,
  RLS_ERR_VALIDATION = 3,
  RLS_ERR_DIMENSION = 4,
  RLS_ERR_PARAMETER = 5,
  RLS_ERR_CONFIG = 6,
  RLS_ERR_IO = 7,
  RLS_ERR_NUMERIC = 8,
  RLS_ERR_INTERNAL = 9,
  RLS_ERR_NULL_ARGUMENT = 10
} rls_status;

typedef enum rls_select_mode {
  RLS_MODE_MINIREC = 0,
  RLS_MODE_RANDOM = 1
} rls_select_mode;

typedef struct rls_dataset rls_dataset;
typedef struct rls_scores rls_scores;
typedef struct rls_manifest rls_manifest;
typedef struct rls_schedule rls_schedule;

RLS_API const char* rls_version(void);
RLS_API const char* rls_last_error(void);
RLS_API const char* rls_status_name(rls_status status);
RLS_API void rls_string_free(char* s);

/* Datasets (JSONL, one record per line). */
RLS_API rls_status rls_dataset_load(const char* path, rls_dataset** out);
RLS_API rls_status rls_dataset_save(const rls_dataset* ds, const char* path);
RLS_API size_t rls_dataset_size(const rls_dataset* ds);
RLS_API size_t rls_dataset_feature_dim(const rls_dataset* ds);
/* Non-zero when every record carries a direction vector. */
RLS_API int rls_dataset_has_grad(const rls_dataset* ds);
RLS_API void rls_dataset_free(rls_dataset* ds);

/* Scoring. lambda is stored with the table and used as the selection default. */
typedef struct rls_scoring_params {
  double mu;
  double sigma;
  double lambda;
  int with_representativeness;
} rls_scoring_params;

/* mu = 0.5, sigma = 0.25, lambda = 1, representativeness off. */
RLS_API rls_scoring_params rls_scoring_params_default(void);
RLS_API rls_status rls_scores_compute(const rls_dataset* ds,
                                      const rls_scoring_params* params,
                                      rls_scores** out);
RLS_API rls_status rls_scores_load(const char* path, rls_scores** out);
RLS_API rls_status rls_scores_save(const rls_scores* scores, const char* path);
RLS_API size_t rls_scores_size(const rls_scores* scores);
RLS_API int rls_scores_has_representativeness(const rls_scores* scores);
RLS_API void rls_scores_free(rls_scores* scores);

/* Selection. seed is only used by RLS_MODE_RANDOM. Every dataset id must
 * have a score entry. */
RLS_API rls_status rls_select(const rls_dataset* ds, const rls_scores* scores,
                              size_t m, double lambda, rls_select_mode mode,
                              uint64_t seed, rls_manifest** out);
RLS_API rls_status rls_manifest_load(const char* path, rls_manifest** out);
RLS_API rls_status rls_manifest_save(const rls_manifest* manifest,
                                     const char* path);
RLS_API size_t rls_manifest_size(const rls_manifest* manifest);
/* Id of the pick at `step`; NULL when out of range. Owned by the manifest. */
RLS_API const char* rls_manifest_id(const rls_manifest* manifest, size_t step);
RLS_API void rls_manifest_free(rls_manifest* manifest);

/* Curriculum. Mean rewards are taken from the score table. */
RLS_API rls_status rls_schedule_build(const rls_manifest* manifest,
                                      const rls_scores* scores, size_t k,
                                      uint64_t seed, rls_schedule** out);
RLS_API rls_status rls_schedule_load(const char* path, rls_schedule** out);
RLS_API rls_status rls_schedule_save_json(const rls_schedule* schedule,
                                          const char* path);
RLS_API rls_status rls_schedule_save_text(const rls_schedule* schedule,
                                          const char* path);
RLS_API size_t rls_schedule_group_count(const rls_schedule* schedule);
RLS_API size_t rls_schedule_group_size(const rls_schedule* schedule,
                                       size_t group);
RLS_API void rls_schedule_free(rls_schedule* schedule);

/* Simulator. config_json uses the pipeline config schema. */
RLS_API rls_status rls_pipeline_resolve_config(const char* config_json,
                                               char** resolved_json,
                                               char** stage_plan);
/* Runs the full pipeline, writing artifacts and report.json into out_dir. */
RLS_API rls_status rls_pipeline_run(const char* config_json,
                                    const char* out_dir, char** report_json);
/* Paired minirec-vs-random runs over seeds first_seed .. first_seed+count-1. */
RLS_API rls_status rls_pipeline_compare(const char* config_json,
                                        uint64_t first_seed, size_t count,
                                        char** summary_json);
/* Generates a task, trains the proxy and writes the pool as a JSONL dataset
 * (rollout rewards from the proxy; grad holds surrogate directions when
 * representativeness is enabled in the config). */
RLS_API rls_status rls_simulate_dataset(const char* config_json,
                                        const char* out_path);

/* Randomized analytic-vs-finite-difference HVP checks. Writes a text table;
 * *passed is set to 1 when every tolerance holds. */
RLS_API rls_status rls_verify_hvp(uint64_t seed, size_t trials,
                                  char** table, int* passed);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* RLSUBSET_RLSUBSET_H_ */
