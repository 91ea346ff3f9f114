#include "graftbench.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "graftbench/activeloop.hpp"
#include "graftbench/campaign.hpp"
#include "graftbench/corpus_io.hpp"
#include "graftbench/errors.hpp"

namespace {

using namespace graftbench;

thread_local std::string g_last_error;

gb_status fail(gb_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
gb_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return GB_OK;
    } catch (const ConfigError& e) {
        return fail(GB_ERROR_CONFIG, e.what());
    } catch (const IoError& e) {
        return fail(GB_ERROR_IO, e.what());
    } catch (const InputError& e) {
        return fail(GB_ERROR_INPUT, e.what());
    } catch (const std::exception& e) {
        return fail(GB_ERROR_INPUT, e.what());
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

struct gb_corpus {
    std::vector<graftbench::SyntheticApp> apps;
    std::string digest;
};

extern "C" {

const char* gb_version(void) { return "0.1.0"; }

const char* gb_last_error(void) { return g_last_error.c_str(); }

gb_status gb_generate_corpus(const char* config_path, int64_t seed, const char* out_dir,
                             int overwrite) {
    if (!config_path || !out_dir) return fail(GB_ERROR_CONFIG, "config_path and out_dir are required");
    return guarded([&] {
        const CorpusConfig config = load_corpus_config(config_path);
        const auto apps = generate_corpus(config, seed);
        write_corpus(out_dir, apps, overwrite != 0);
    });
}

gb_status gb_corpus_open(const char* dir, gb_corpus** out) {
    if (!dir || !out) return fail(GB_ERROR_CONFIG, "dir and out are required");
    *out = nullptr;
    return guarded([&] {
        auto corpus = std::make_unique<gb_corpus>();
        corpus->apps = load_corpus(dir);
        corpus->digest = corpus_digest(dir);
        *out = corpus.release();
    });
}

void gb_corpus_close(gb_corpus* corpus) { delete corpus; }

int64_t gb_corpus_app_count(const gb_corpus* corpus) {
    return corpus ? static_cast<int64_t>(corpus->apps.size()) : 0;
}

int64_t gb_corpus_label_count(const gb_corpus* corpus, int malicious) {
    if (!corpus) return 0;
    const Label wanted = malicious ? Label::Malicious : Label::Benign;
    int64_t n = 0;
    for (const auto& app : corpus->apps)
        if (app.label == wanted) ++n;
    return n;
}

const char* gb_corpus_digest(const gb_corpus* corpus) {
    return corpus ? corpus->digest.c_str() : "";
}

void gb_run_options_defaults(gb_run_options* options) {
    if (!options) return;
    options->mode = "active";
    options->feature_kind = "dynamic";
    options->runs = 25;
    options->t_max = 10;
    options->epsilon = 0.01;
    options->split_ratio = 2.0 / 3.0;
    options->master_seed = 0;
    options->max_steps = 30;
    options->intent_broadcast_probability = 0.25;
}

gb_status gb_run_experiments(const gb_corpus* corpus, const gb_run_options* options,
                             const char* results_path, const char* manifest_path) {
    if (!corpus || !options || !results_path)
        return fail(GB_ERROR_CONFIG, "corpus, options and results_path are required");
    return guarded([&] {
        ExperimentConfig config;
        config.mode = parse_experiment_mode(options->mode ? options->mode : "");
        config.feature_kind = parse_feature_kind(options->feature_kind ? options->feature_kind : "");
        config.runs = options->runs;
        config.t_max = options->t_max;
        config.epsilon = options->epsilon;
        config.split_ratio = options->split_ratio;
        config.master_seed = options->master_seed;
        config.stimulation.max_steps = options->max_steps;
        config.stimulation.intent_broadcast_probability = options->intent_broadcast_probability;
        validate_experiment_config(config);

        const std::string started = utc_timestamp();
        std::ofstream results(results_path, std::ios::binary | std::ios::app);
        if (!results) throw IoError(std::string("cannot write ") + results_path);
        run_campaign(corpus->apps, config, results);
        results.flush();
        if (!results) throw IoError(std::string("results write failed for ") + results_path);

        std::filesystem::path manifest =
            manifest_path ? std::filesystem::path(manifest_path)
                          : std::filesystem::path(results_path).parent_path() / "manifest.json";
        std::ofstream manifest_out(manifest, std::ios::binary);
        if (!manifest_out) throw IoError("cannot write " + manifest.string());
        manifest_out << make_run_manifest(config, corpus->digest, started, utc_timestamp());
        if (!manifest_out) throw IoError("manifest write failed for " + manifest.string());
    });
}

gb_status gb_write_report(const char* results_path, const char* summary_csv_path,
                          int per_iteration) {
    if (!results_path || !summary_csv_path)
        return fail(GB_ERROR_CONFIG, "results_path and summary_csv_path are required");
    return guarded([&] {
        std::ifstream in(results_path, std::ios::binary);
        if (!in) throw InputError(std::string("cannot read ") + results_path);
        const auto rows = summarize_results(in, per_iteration != 0);
        std::ofstream out(summary_csv_path, std::ios::binary);
        if (!out) throw IoError(std::string("cannot write ") + summary_csv_path);
        write_summary_csv(rows, out);
    });
}

gb_status gb_ingest_logs(const char* log_dir, const char* out_dir, int strict,
                         gb_ingest_report* report) {
    if (!log_dir || !out_dir) return fail(GB_ERROR_CONFIG, "log_dir and out_dir are required");
    return guarded([&] {
        const IngestReport result = ingest_logs(log_dir, out_dir, strict != 0);
        if (report) {
            report->files = result.files;
            report->traces = result.traces;
            report->calls = result.calls;
            report->skipped = result.skipped;
        }
    });
}

}  // extern "C"
