#ifndef HEADGATE_H
#define HEADGATE_H

/*
 * C API for the headgate toolkit: load a model, run the single-head masking
 * sweep over an aligned corpus, classify heads, and emit reports.
 *
 * Conventions:
 *  - Every fallible call returns hg_status; HG_OK is 0. On failure,
 *    hg_last_error_message() returns a description (thread-local, valid
 *    until the next failing call on the same thread).
 *  - Objects are opaque handles created by hg_*_load/create and released
 *    with the matching hg_*_free. Freeing NULL is a no-op.
 *  - Layer and head indices at this boundary are 0-based. Files written for
 *    people (scores.json, tables, heatmaps) label them 1-based.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hg_status {
    HG_OK = 0,
    HG_ERROR_NOT_FOUND = 1,
    HG_ERROR_IO = 2,
    HG_ERROR_FORMAT = 3,
    HG_ERROR_CONFIG = 4,
    HG_ERROR_CREDENTIALS = 5,
    HG_ERROR_JUDGE = 6,
    HG_ERROR_EVAL = 7,
    HG_ERROR_INVALID = 8,
    HG_ERROR_INTERNAL = 9
} hg_status;

typedef struct hg_model hg_model;
typedef struct hg_corpus hg_corpus;
typedef struct hg_judge hg_judge;
typedef struct hg_sweep_result hg_sweep_result;

const char* hg_version(void);
const char* hg_last_error_message(void);

/* ---- model ---- */

hg_status hg_model_load(const char* path, hg_model** out);
void hg_model_free(hg_model* model);

uint32_t hg_model_n_layers(const hg_model* model);
uint32_t hg_model_n_heads(const hg_model* model);
uint32_t hg_model_d_model(const hg_model* model);
uint32_t hg_model_vocab_size(const hg_model* model);
uint32_t hg_model_max_seq_len(const hg_model* model);

/*
 * Greedy generation. gates is a row-major n_layers x n_heads array of 0/1
 * entries, or NULL for all-on. eos_token < 0 disables end-of-sequence
 * stopping. Writes at most capacity tokens of the generated suffix and the
 * true suffix length to *out_len.
 */
hg_status hg_generate(const hg_model* model, const uint32_t* prompt, size_t prompt_len,
                      const uint8_t* gates, size_t n_gates, size_t max_new_tokens,
                      int64_t eos_token, uint32_t* out_tokens, size_t capacity,
                      size_t* out_len);

/* ---- byte tokenizer ---- */

/* Returns the token count for text (== strlen); fills up to capacity. */
size_t hg_encode_bytes(const char* text, uint32_t* out_tokens, size_t capacity);
/* Returns the decoded byte length; writes up to capacity-1 bytes + NUL. */
size_t hg_decode_bytes(const uint32_t* tokens, size_t n_tokens, char* out_text,
                       size_t capacity);

/* ---- corpus ---- */

hg_status hg_corpus_load(const char* path, const char* const* languages, size_t n_languages,
                         hg_corpus** out);
void hg_corpus_free(hg_corpus* corpus);
size_t hg_corpus_size(const hg_corpus* corpus);

/* ---- judges ---- */

hg_status hg_judge_create_exact(hg_judge** out);
hg_status hg_judge_create_containment(hg_judge** out);
hg_status hg_judge_create_replay(const char* fixture_path, hg_judge** out);
/*
 * Live chat-completions judge. api_key_env names the environment variable
 * holding the bearer token; the key itself never crosses this API.
 */
hg_status hg_judge_create_llm(const char* endpoint, const char* model_name,
                              const char* api_key_env, size_t max_retries, int64_t timeout_ms,
                              double requests_per_minute, hg_judge** out);
void hg_judge_free(hg_judge* judge);

/* One verdict for a (question, response, ground truth) triple. */
hg_status hg_judge_score(hg_judge* judge, const char* question, const char* response,
                         const char* ground_truth, int* out_score);

/* ---- sweep ---- */

typedef struct hg_sweep_options {
    uint32_t layer_first; /* inclusive, 0-based */
    uint32_t layer_last;
    uint32_t head_first;
    uint32_t head_last;
    size_t examples_per_language;
    size_t max_new_tokens;
    const char* cache_dir;
    uint64_t seed;
    size_t parallel; /* worker threads, >= 1 */
} hg_sweep_options;

/*
 * Baseline plus one evaluation per (layer, head) per corpus language, cached
 * and resumable under options->cache_dir.
 */
hg_status hg_run_sweep(const hg_model* model, const hg_corpus* corpus, hg_judge* judge,
                       const hg_sweep_options* options, hg_sweep_result** out);
void hg_sweep_result_free(hg_sweep_result* result);

hg_status hg_sweep_result_save(const hg_sweep_result* result, const char* scores_path,
                               const char* records_path);
size_t hg_sweep_result_passes_total(const hg_sweep_result* result);
size_t hg_sweep_result_passes_reused(const hg_sweep_result* result);
size_t hg_sweep_result_passes_computed(const hg_sweep_result* result);
hg_status hg_sweep_result_baseline_accuracy(const hg_sweep_result* result,
                                            const char* language, double* out);
hg_status hg_sweep_result_cell_accuracy(const hg_sweep_result* result, const char* language,
                                        uint32_t layer, uint32_t head, double* out);

/* ---- classification and reports (file level) ---- */

/*
 * Reads scores.json, classifies every swept head with |delta| >= threshold
 * as the contribution test, writes the classification JSON.
 */
hg_status hg_classify_file(const char* scores_path, double threshold,
                           const char* out_classification_path);

/* Writes the heads_*.txt taxonomy tables for a stored classification. */
hg_status hg_emit_tables(const char* classification_path, const char* out_dir);

/*
 * Emits heatmap_{lang}.csv/.svg (accuracy), heatmap_{lang}_delta.csv/.svg,
 * heads_*.txt taxonomy tables, and qualitative_diffs.json into out_dir.
 */
hg_status hg_report_files(const char* scores_path, const char* classification_path,
                          const char* records_path, const hg_corpus* corpus,
                          const char* out_dir);

/* ---- utilities ---- */

/* SHA-256 of a file as lowercase hex; out_hex receives 64 chars + NUL. */
hg_status hg_file_sha256_hex(const char* path, char out_hex[65]);

/*
 * Writes a runnable demo into dir: model.hgt (random weights, byte
 * vocabulary), corpus.jsonl (aligned en/hi), config.json.
 */
hg_status hg_fixture_write(const char* dir, uint64_t seed, uint32_t n_layers,
                           uint32_t n_heads, uint32_t d_head, uint32_t max_seq_len,
                           uint32_t max_new_tokens);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HEADGATE_H */
