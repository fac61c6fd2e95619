/* include/lhuclab.h
 *
 * Copyright 2026 lhuclab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * C API of the lhuclab shared library.
 *
 * Every function returns LHUC_OK or an error status; on failure a
 * human-readable message is available from lhuc_last_error() until the next
 * failing call on the same thread.  String outputs (`char**` parameters) are
 * heap-allocated NUL-terminated JSON documents owned by the caller, released
 * with lhuc_string_free().  Any output pointer may be NULL when the caller
 * does not want that result.  On failure no output parameter is written.
 */

#ifndef LHUCLAB_H_
#define LHUCLAB_H_

#include <stdint.h>

#if defined(_WIN32)
#define LHUC_API __declspec(dllexport)
#elif defined(__GNUC__)
#define LHUC_API __attribute__((visibility("default")))
#else
#define LHUC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lhuc_status {
  LHUC_OK = 0,
  LHUC_ERR_INVALID_ARGUMENT = 1,
  LHUC_ERR_SHAPE = 2,
  LHUC_ERR_CONFIG = 3,
  LHUC_ERR_IO = 4,
  LHUC_ERR_FORMAT = 5,
  LHUC_ERR_NUMERIC = 6,
  LHUC_ERR_UNSUPPORTED = 7,
  LHUC_ERR_INTERNAL = 8
} lhuc_status;

/* Library version as "major.minor.patch"; static storage, do not free. */
LHUC_API const char* lhuc_version(void);

/* Message of the last failing call on this thread ("" if none); static
 * thread-local storage, do not free. */
LHUC_API const char* lhuc_last_error(void);

/* Releases a string returned through a char** output. NULL is a no-op. */
LHUC_API void lhuc_string_free(char* s);

/* Runs the experiment a JSON config file describes.  Artifacts are written
 * to the config's output_dir; *summary_json_out (optional) receives
 * {"output_dir": ..., "summary": {metric: value, ...}}. */
LHUC_API lhuc_status lhuc_run_experiment_file(const char* config_path,
                                              char** summary_json_out);

/* Same, with the config document passed as a string. */
LHUC_API lhuc_status lhuc_run_experiment_json(const char* config_json,
                                              char** summary_json_out);

/* Finite-difference verification of the analytic gradients on `cases`
 * randomized network/bank/batch instances (cases <= 0 selects the default
 * of 25).  *pass_out receives 1/0, *max_rel_out the worst relative error,
 * *report_json_out the full per-case report. */
LHUC_API lhuc_status lhuc_gradcheck(uint64_t seed, int cases, int* pass_out,
                                    double* max_rel_out,
                                    char** report_json_out);

/* Generates the dataset files a task-spec JSON document describes, named
 * <out_base>.train.lds and <out_base>.test.lds for tasks with a held-out
 * split and <out_base>.lds otherwise.  *files_json_out (optional) receives
 * {"files": [path, ...]}. */
LHUC_API lhuc_status lhuc_synth_generate(const char* spec_json,
                                         const char* out_base,
                                         char** files_json_out);

/* Validates a checkpoint file (including its checksum) and describes it:
 * layer shapes, parameter counts, reparametrisation, bank clusters and
 * provenance. */
LHUC_API lhuc_status lhuc_checkpoint_inspect(const char* path,
                                             char** info_json_out);

/* Validates a dataset file (including its checksum) and describes it:
 * task kind, frame/feature counts, speakers and environments. */
LHUC_API lhuc_status lhuc_dataset_inspect(const char* path,
                                          char** info_json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LHUCLAB_H_ */
