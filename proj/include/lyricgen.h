/* Copyright 2026 The lyricgen Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef LYRICGEN_H_
#define LYRICGEN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LG_BUILDING_LIBRARY)
#define LG_API __attribute__((visibility("default")))
#else
#define LG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lg_status {
  LG_OK = 0,
  LG_ERR_USAGE = 1,
  LG_ERR_DATA = 2,
  LG_ERR_VERIFICATION = 3,
  LG_ERR_INTERNAL = 4
} lg_status;

typedef struct lg_lda lg_lda;
typedef struct lg_model lg_model;

/* Message of the last failing call on this thread; "" when none. */
LG_API const char* lg_last_error(void);

/* Releases strings returned through char** out-parameters. */
LG_API void lg_free_string(char* s);

LG_API const char* lg_version(void);

/* Each command takes a RunConfig as JSON text (NULL means defaults) and, on
 * success, stores a JSON report in *report_json. */
LG_API lg_status lg_prepare(const char* config_json, char** report_json);
LG_API lg_status lg_lda_train(const char* config_json, char** report_json);
LG_API lg_status lg_embed_train(const char* config_json, char** report_json);
LG_API lg_status lg_train(const char* config_json, char** report_json);
/* Returns LG_ERR_VERIFICATION when any group fails; the report is still set. */
LG_API lg_status lg_gradcheck(const char* config_json, char** report_json);
LG_API lg_status lg_bench(const char* config_json, char** report_json);
/* Generation driven entirely by the config; writes paths.trace if set. */
LG_API lg_status lg_generate(const char* config_json, char** result_json);
/* Fully resolved config (derived seeds filled in). */
LG_API lg_status lg_resolve_config(const char* config_json, char** resolved_json);

LG_API lg_status lg_lda_load(const char* path, lg_lda** out);
LG_API void lg_lda_free(lg_lda* lda);
LG_API int lg_lda_num_topics(const lg_lda* lda);
/* JSON array (one per topic) of [{"phrase":..,"score":..}, ...]. */
LG_API lg_status lg_lda_keywords(const lg_lda* lda, int n, char** keywords_json);
/* Theme distribution of one song given as newline-separated lines. */
LG_API lg_status lg_lda_infer(const lg_lda* lda, const char* song_text, int sweeps, uint64_t seed,
                              char** result_json);

LG_API lg_status lg_model_load(const char* checkpoint_path, lg_model** out);
LG_API void lg_model_free(lg_model* model);
LG_API int lg_model_vocab_size(const lg_model* model);
/* options_json holds the "generate" section of a RunConfig. lda may be NULL.
 * trace_jsonl may be NULL when the trace is not wanted. */
LG_API lg_status lg_model_generate(const lg_model* model, const lg_lda* lda, const char* options_json,
                                   char** lines_json, char** trace_jsonl);

#ifdef __cplusplus
}
#endif

#endif  /* LYRICGEN_H_ */
