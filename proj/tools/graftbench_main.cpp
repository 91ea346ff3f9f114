// graftbench command line front end. All real work happens behind the C API
// in libgraftbench; this binary only parses flags and reports errors.
//
// Exit codes: 0 ok, 2 usage/config error, 3 output I/O error, 4 input parse
// error.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "graftbench.h"

namespace {

int report_failure(gb_status status) {
    std::fprintf(stderr, "error: %s\n", gb_last_error());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic repackaged-app detection workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gb_version()));

    // gen-corpus
    std::string gen_config, gen_out;
    long long gen_seed = 0;
    bool gen_force = false;
    auto* gen = app.add_subcommand("gen-corpus", "generate a labeled synthetic app corpus");
    gen->add_option("--config", gen_config, "key=value corpus config file")->required();
    gen->add_option("--seed", gen_seed, "corpus seed")->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_flag("--force", gen_force, "overwrite a non-empty output directory");

    // run
    gb_run_options options;
    gb_run_options_defaults(&options);
    std::string run_mode = options.mode, run_kind = options.feature_kind;
    std::string run_corpus, run_out, run_manifest;
    long long run_seed = options.master_seed;
    auto* run = app.add_subcommand("run", "execute seeded detection experiments");
    run->add_option("--mode", run_mode, "static | dynamic | active")->required();
    run->add_option("--corpus", run_corpus, "corpus directory")->required();
    run->add_option("--feature-kind", run_kind, "basic | permission | api | all | dynamic | hybrid")
        ->required();
    run->add_option("--runs", options.runs, "number of seeded runs (default 25)");
    auto* tmax_opt = run->add_option("--tmax", options.t_max, "iteration cap (default 10)");
    run->add_option("--eps", options.epsilon, "allowed training-F1 drop (default 0.01)");
    run->add_option("--split-ratio", options.split_ratio, "training fraction (default 2/3)");
    run->add_option("--seed", run_seed, "master seed")->required();
    run->add_option("--max-steps", options.max_steps, "walk steps per session (default 30)");
    run->add_option("--intent-prob", options.intent_broadcast_probability,
                    "per-step intent broadcast probability (default 0.25)");
    run->add_option("--out", run_out, "results JSON-lines file (appended)")->required();
    run->add_option("--manifest", run_manifest, "manifest path (default: manifest.json next to --out)");

    // report
    std::string report_in, report_out;
    bool per_iteration = false;
    auto* report = app.add_subcommand("report", "median summary CSV from a results file");
    report->add_option("--in", report_in, "results JSON-lines file")->required();
    report->add_option("--out", report_out, "summary CSV path")->required();
    report->add_flag("--per-iteration", per_iteration, "medians per iteration instead of final");

    // ingest
    std::string ingest_logs_dir, ingest_out;
    bool ingest_strict = false;
    auto* ingest = app.add_subcommand("ingest", "convert API-hook logs to canonical traces");
    ingest->add_option("--logs", ingest_logs_dir, "directory of log files")->required();
    ingest->add_option("--out", ingest_out, "output directory for .trace.jsonl files")->required();
    ingest->add_flag("--strict", ingest_strict, "fail on the first malformed line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) {
        const gb_status status =
            gb_generate_corpus(gen_config.c_str(), gen_seed, gen_out.c_str(), gen_force ? 1 : 0);
        if (status != GB_OK) return report_failure(status);
        std::printf("corpus written to %s\n", gen_out.c_str());
        return 0;
    }

    if (run->parsed()) {
        if (run_mode != "active" && tmax_opt->count() > 0)
            std::fprintf(stderr, "warning: --tmax is ignored in %s mode (single iteration)\n",
                         run_mode.c_str());
        options.mode = run_mode.c_str();
        options.feature_kind = run_kind.c_str();
        options.master_seed = run_seed;
        gb_corpus* corpus = nullptr;
        gb_status status = gb_corpus_open(run_corpus.c_str(), &corpus);
        if (status != GB_OK) return report_failure(status);
        status = gb_run_experiments(corpus, &options, run_out.c_str(),
                                    run_manifest.empty() ? nullptr : run_manifest.c_str());
        gb_corpus_close(corpus);
        if (status != GB_OK) return report_failure(status);
        std::printf("results appended to %s\n", run_out.c_str());
        return 0;
    }

    if (report->parsed()) {
        const gb_status status =
            gb_write_report(report_in.c_str(), report_out.c_str(), per_iteration ? 1 : 0);
        if (status != GB_OK) return report_failure(status);
        std::printf("summary written to %s\n", report_out.c_str());
        return 0;
    }

    if (ingest->parsed()) {
        gb_ingest_report stats{};
        const gb_status status = gb_ingest_logs(ingest_logs_dir.c_str(), ingest_out.c_str(),
                                                ingest_strict ? 1 : 0, &stats);
        if (status != GB_OK) return report_failure(status);
        std::printf("files: %lld, traces: %lld, calls: %lld, skipped: %lld\n",
                    static_cast<long long>(stats.files), static_cast<long long>(stats.traces),
                    static_cast<long long>(stats.calls), static_cast<long long>(stats.skipped));
        return 0;
    }

    return 2;
}
