/* graftbench C API: synthetic repackaged-app corpora, random-walk stimulation
 * and active-learning detection experiments behind a stable C ABI.
 *
 * All functions return gb_status; 0 is success. On failure, gb_last_error()
 * returns a thread-local message describing what went wrong. Handles returned
 * through out-parameters stay valid until the matching *_close call.
 */
#ifndef GRAFTBENCH_H
#define GRAFTBENCH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb_status {
    GB_OK = 0,
    GB_ERROR_CONFIG = 2, /* invalid configuration or arguments */
    GB_ERROR_IO = 3,     /* output I/O failure */
    GB_ERROR_INPUT = 4   /* unreadable or malformed input data */
} gb_status;

const char* gb_version(void);

/* Message for the most recent failure on this thread; empty if none. */
const char* gb_last_error(void);

/* Generates a labeled corpus from a key=value config file into out_dir
 * (one JSON file per app, index.json, ground_truth.json). A non-empty
 * out_dir is an error unless overwrite is non-zero. */
gb_status gb_generate_corpus(const char* config_path, int64_t seed, const char* out_dir,
                             int overwrite);

typedef struct gb_corpus gb_corpus;

gb_status gb_corpus_open(const char* dir, gb_corpus** out);
void gb_corpus_close(gb_corpus* corpus);
int64_t gb_corpus_app_count(const gb_corpus* corpus);
int64_t gb_corpus_label_count(const gb_corpus* corpus, int malicious);
/* Digest of the corpus index file, hex-encoded. */
const char* gb_corpus_digest(const gb_corpus* corpus);

typedef struct gb_run_options {
    const char* mode;         /* "static" | "dynamic" | "active" */
    const char* feature_kind; /* "basic" | "permission" | "api" | "all" | "dynamic" | "hybrid" */
    int runs;
    int t_max;
    double epsilon;
    double split_ratio;
    int64_t master_seed;
    int max_steps;
    double intent_broadcast_probability;
} gb_run_options;

void gb_run_options_defaults(gb_run_options* options);

/* Runs options->runs seeded experiments over the corpus, appending one JSON
 * line per (run, iteration, classifier) to results_path and writing a run
 * manifest to manifest_path (NULL writes manifest.json next to the results
 * file). */
gb_status gb_run_experiments(const gb_corpus* corpus, const gb_run_options* options,
                             const char* results_path, const char* manifest_path);

/* Aggregates a results file into summary.csv-style medians. */
gb_status gb_write_report(const char* results_path, const char* summary_csv_path,
                          int per_iteration);

typedef struct gb_ingest_report {
    int64_t files;
    int64_t traces;
    int64_t calls;
    int64_t skipped;
} gb_ingest_report;

/* Parses API-hook log files from log_dir into canonical .trace.jsonl files in
 * out_dir. Tolerant by default; strict != 0 fails on the first bad line. */
gb_status gb_ingest_logs(const char* log_dir, const char* out_dir, int strict,
                         gb_ingest_report* report);

#ifdef __cplusplus
}
#endif

#endif /* GRAFTBENCH_H */
