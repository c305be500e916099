#ifndef CHRONOCHAT_H
#define CHRONOCHAT_H

/*
 * C API of the chronochat simulated-time dialogue toolkit.
 *
 * Every function returns CHRONO_OK or an error code; the message for the
 * last failing call on the current thread is available through
 * chrono_last_error(). Output strings are heap-allocated and must be
 * released with chrono_free(). Structured inputs and outputs are JSON
 * strings; durations appear as textual phrases ("3 days") throughout.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHRONO_API __declspec(dllexport)
#else
#define CHRONO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    CHRONO_OK = 0,
    /* temporal */
    CHRONO_E_UNRECOGNIZED_UNIT = 1,
    CHRONO_E_NON_POSITIVE_QUANTITY = 2,
    CHRONO_E_UNPARSEABLE_TEXT = 3,
    CHRONO_E_ZERO_GAP = 4,
    /* event catalog */
    CHRONO_E_MISSING_FILE = 5,
    CHRONO_E_MALFORMED_DOCUMENT = 6,
    CHRONO_E_INVARIANT_VIOLATION = 7,
    CHRONO_E_NO_SUCH_SCHEDULE = 8,
    CHRONO_E_POOL_EXHAUSTED = 9,
    /* timeline */
    CHRONO_E_HORIZON_TOO_SHORT = 10,
    CHRONO_E_BEYOND_HORIZON = 11,
    /* progress */
    CHRONO_E_ZERO_DURATION = 12,
    CHRONO_E_EMPTY_ITEMS = 13,
    /* llm gateway */
    CHRONO_E_MISSING_SLOT = 14,
    CHRONO_E_UNKNOWN_TEMPLATE = 15,
    CHRONO_E_TIMEOUT = 16,
    CHRONO_E_HTTP_ERROR = 17,
    CHRONO_E_MISSING_FIXTURE = 18,
    CHRONO_E_RATE_LIMITED = 19,
    CHRONO_E_EMPTY_REPLY = 20,
    CHRONO_E_NO_DURATION_IN_REPLY = 21,
    CHRONO_E_NO_PARSABLE_STEPS = 22,
    /* dialogue engine */
    CHRONO_E_MODE_SECTION_MISMATCH = 23,
    CHRONO_E_EMPTY_MEMORY = 24,
    /* dataset */
    CHRONO_E_EMPTY_CORPUS = 25,
    /* eval */
    CHRONO_E_NO_JUDGMENTS_FOR_ATTRIBUTE = 26,
    CHRONO_E_DEGENERATE_AGREEMENT = 27,
    /* service */
    CHRONO_E_BAD_CONFIG = 28,
    CHRONO_E_ROOM_FULL = 29,
    CHRONO_E_NO_SUCH_ROOM = 30,
    CHRONO_E_WRONG_PHASE = 31,
    CHRONO_E_INVALID_TOKEN = 32,
    CHRONO_E_EMPTY_TEXT = 33,
    CHRONO_E_TOO_FEW_UTTERANCES = 34,
    /* generic */
    CHRONO_E_IO = 35,
    CHRONO_E_INTERNAL = 99
};

typedef struct chrono_pool chrono_pool;
typedef struct chrono_backend chrono_backend;
typedef struct chrono_service chrono_service;

CHRONO_API const char* chrono_version(void);
CHRONO_API const char* chrono_last_error(void);
CHRONO_API void chrono_free(char* text);

/* ---- durations and session gaps ---------------------------------- */

CHRONO_API int chrono_duration_parse(const char* phrase, int64_t* minutes_out);
CHRONO_API int chrono_duration_format(int64_t minutes, char** phrase_out);
CHRONO_API int chrono_gap_bucket(const char* phrase, char** bucket_out);
/* JSON array of `count` sampled gap phrases for the seed. */
CHRONO_API int chrono_sample_gaps(uint64_t seed, size_t count, char** json_out);

/* ---- progress representations ------------------------------------ */

CHRONO_API int chrono_progress_label(const char* duration_phrase, const char* elapsed_phrase,
                                     char** label_out);
/* schedule_json: [{"description": "...", "duration": "one week"}, ...] */
CHRONO_API int chrono_split_schedule(const char* schedule_json, const char* elapsed_phrase,
                                     char** split_json_out);

/* ---- event pools and timelines ------------------------------------ */

CHRONO_API int chrono_pool_open(const char* path, chrono_pool** pool_out);
CHRONO_API void chrono_pool_close(chrono_pool* pool);
CHRONO_API int chrono_pool_summary(const chrono_pool* pool, char** json_out);
/* Both speakers' timelines as {"speakers": {"A": ..., "B": ...}}. */
CHRONO_API int chrono_timeline_generate(const chrono_pool* pool, const char* horizon_phrase,
                                        uint64_t seed, char** pair_json_out);
/* timeline_json: one speaker's dump from chrono_timeline_generate. */
CHRONO_API int chrono_timeline_advance(const char* timeline_json, const char* elapsed_phrase,
                                       int session_index, const char* gap_phrase,
                                       char** result_json_out);

/* ---- language-model gateway --------------------------------------- */

/* config_json: {"mode": "http"|"mock", "endpoint": ..., "key_var": ...,
 * "model": ..., "fixtures": ..., "timeout_seconds": ..., "max_retries": ...}.
 * Pass NULL or "" to read CHRONOCHAT_LLM_* from the environment. */
CHRONO_API int chrono_backend_open(const char* config_json, chrono_backend** backend_out);
CHRONO_API void chrono_backend_close(chrono_backend* backend);
CHRONO_API int chrono_render_prompt(const char* template_name, const char* bindings_json,
                                    char** text_out);
/* style: "instruction" (default), "slot_filling" or "qa". */
CHRONO_API int chrono_extract_events(chrono_backend* backend, const char* history,
                                     const char* style, char** events_json_out);
CHRONO_API int chrono_estimate_duration(chrono_backend* backend, const char* description,
                                        char** phrase_out);
CHRONO_API int chrono_generate_schedule(chrono_backend* backend, const char* description,
                                        const char* duration_phrase, char** schedule_json_out);

/* ---- time-aware context and self-chat ------------------------------ */

/* inputs_json: {"history": [...], "events": [{"speaker": ..., "descriptions":
 * [...]}], "progress": [{"speaker": ..., "items": [{"description": ...,
 * "label": "3/4 finished"}]}], "schedules": [{"speaker": ..., "items":
 * [{"description": ..., "elapsed": "2 weeks", "steps": [...]}]}],
 * "gap": "2 hours"}. mode: none|gap_only|progress|schedule|both. */
CHRONO_API int chrono_build_context(const char* inputs_json, const char* mode,
                                    size_t char_budget, char** text_out);
/* config_json: {"num_sessions", "min_utterances", "mode", "seed", "gaps",
 * "opening_script", ...}. Returns the conversation as one JSON line. */
CHRONO_API int chrono_self_chat(const char* config_json, const char* backend_a_json,
                                const char* backend_b_json, const char* pool_path,
                                char** conversation_json_out);

/* ---- conversation corpora ------------------------------------------ */

/* Reads a .chrono.jsonl corpus; optionally re-exports the valid lines to
 * out_path. The report lists malformed lines with line numbers. */
CHRONO_API int chrono_import_corpus(const char* path, const char* out_path,
                                    char** report_json_out);
/* Best-effort adapter over a published GapChat checkout. */
CHRONO_API int chrono_import_gapchat(const char* directory, const char* out_path,
                                     char** report_json_out);
CHRONO_API int chrono_corpus_stats(const char* path, int as_json, char** out);

/* ---- pairwise human-evaluation aggregation -------------------------- */

CHRONO_API int chrono_eval_compare(const char* judgments_path, const char* model,
                                   const char* baseline, int as_json, int by_gap, char** out);
/* matrix_json: [[3,0],[2,1],...] with rows summing to raters_per_item. */
CHRONO_API int chrono_eval_kappa(const char* matrix_json, int raters_per_item,
                                 double* kappa_out);
/* pairs file: one JSON object per line: {"labels": {"<event>": "<label>"},
 * "utterances": [...]}. */
CHRONO_API int chrono_eval_topic_selection(const char* pairs_path, size_t* correct_out,
                                           size_t* total_out);

/* ---- chat-room service ---------------------------------------------- */

/* config_json: {"data_dir": ..., "bind_addr": ..., "port": ...,
 * "default_pool": ..., "poll_wait_seconds": ...}. Unset fields fall back
 * to CHRONOCHAT_DATA_DIR / CHRONOCHAT_BIND_ADDR. */
CHRONO_API int chrono_service_start(const char* config_json, chrono_service** service_out);
CHRONO_API int chrono_service_port(const chrono_service* service);
CHRONO_API int chrono_service_stop(chrono_service* service);

#ifdef __cplusplus
}
#endif

#endif /* CHRONOCHAT_H */
