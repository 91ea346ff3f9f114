#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "graftbench/activeloop.hpp"

namespace graftbench {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kEnsembleName = "Ensemble";

// Executes config.runs seeded runs (run seed = derived from the master seed
// and the run index) and appends one JSON line per iteration per classifier
// (12 members + the ensemble) to the results stream. Returns the full result.
ExperimentResult run_campaign(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                              std::ostream& results);

// results.jsonl lines for a single run, in canonical order.
std::vector<std::string> result_lines(const ExperimentConfig& config, const RunResult& run);

// manifest.json: config echo, corpus digest, tool version, per-run seeds and
// wall-clock timestamps.
std::string make_run_manifest(const ExperimentConfig& config, const std::string& corpus_hash,
                              const std::string& started, const std::string& finished);

// Median with the mean-of-middle rule for even counts.
double median(std::vector<double> values);

struct SummaryRow {
    std::string classifier;
    std::string feature_kind;
    std::string iteration;  // iteration index, or "final"
    std::string metric;     // f1_train | spec_train | f1_test | spec_test
    double value = 0;
};

// Medians over runs from a results.jsonl stream. Default: the final
// iteration's score per run. per_iteration: medians per iteration index over
// the runs that reached it.
std::vector<SummaryRow> summarize_results(std::istream& results, bool per_iteration);

// CSV with header exactly "classifier,feature_kind,iteration,metric,median".
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& sink);

struct IngestReport {
    long files = 0;
    long traces = 0;
    long calls = 0;
    long skipped = 0;
};

// Parses every regular file in log_dir (sorted by name) and writes canonical
// <stem>.trace.jsonl files into out_dir. Strict mode propagates the first
// malformed line as InputError naming file and line.
IngestReport ingest_logs(const std::filesystem::path& log_dir, const std::filesystem::path& out_dir,
                         bool strict);

}  // namespace graftbench
