#include "graftbench/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "graftbench/errors.hpp"
#include "graftbench/rng.hpp"
#include "graftbench/trace_io.hpp"

namespace graftbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json score_line(const ExperimentConfig& config, int run_index, int t, const std::string& name,
                        const Metrics& train, const Metrics& test, int rows_train, int rows_test) {
    return ordered_json{
        {"run", run_index},
        {"iteration", t},
        {"classifier", name},
        {"mode", std::string(experiment_mode_name(config.mode))},
        {"feature_kind", std::string(feature_kind_name(config.feature_kind))},
        {"f1_train", train.f1},
        {"spec_train", train.specificity},
        {"f1_test", test.f1},
        {"spec_test", test.specificity},
        {"rows_train", rows_train},
        {"rows_test", rows_test},
    };
}

}  // namespace

std::vector<std::string> result_lines(const ExperimentConfig& config, const RunResult& run) {
    std::vector<std::string> lines;
    for (const auto& record : run.iterations) {
        for (const auto& member : record.members)
            lines.push_back(score_line(config, run.run_index, record.t, member.name, member.train,
                                       member.test, record.rows_train, record.rows_test)
                                .dump());
        auto ensemble = score_line(config, run.run_index, record.t, std::string(kEnsembleName),
                                   record.train_metrics, record.test_metrics, record.rows_train,
                                   record.rows_test);
        ensemble["misclassified_train"] = record.misclassified_train_ids;
        ensemble["misclassified_test"] = record.misclassified_test_ids;
        lines.push_back(ensemble.dump());
    }
    return lines;
}

ExperimentResult run_campaign(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                              std::ostream& results) {
    validate_experiment_config(config);
    ExperimentResult out;
    out.config = config;
    for (int r = 0; r < config.runs; ++r) {
        RunResult run = run_experiment(corpus, config, r);
        for (const auto& line : result_lines(config, run)) results << line << '\n';
        if (!results) throw IoError("results write failed");
        out.runs.push_back(std::move(run));
    }
    return out;
}

std::string make_run_manifest(const ExperimentConfig& config, const std::string& corpus_hash,
                              const std::string& started, const std::string& finished) {
    ordered_json seeds = ordered_json::array();
    for (int r = 0; r < config.runs; ++r) seeds.push_back(derive_seed(config.master_seed, "run", r));
    ordered_json j{
        {"tool_version", std::string(kToolVersion)},
        {"config",
         ordered_json{
             {"mode", std::string(experiment_mode_name(config.mode))},
             {"feature_kind", std::string(feature_kind_name(config.feature_kind))},
             {"split_ratio", config.split_ratio},
             {"t_max", config.t_max},
             {"epsilon", config.epsilon},
             {"runs", config.runs},
             {"master_seed", config.master_seed},
             {"max_steps", config.stimulation.max_steps},
             {"intent_broadcast_probability", config.stimulation.intent_broadcast_probability},
         }},
        {"corpus_hash", corpus_hash},
        {"run_seeds", std::move(seeds)},
        {"started", started},
        {"finished", finished},
    };
    return j.dump(2) + "\n";
}

double median(std::vector<double> values) {
    if (values.empty()) throw ConfigError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

struct ScoreKey {
    std::string classifier;
    std::string feature_kind;

    auto operator<=>(const ScoreKey&) const = default;
};

struct RunScores {
    // iteration -> metric values, insertion keyed by iteration number
    std::map<int, std::array<double, 4>> iterations;
};

constexpr std::array<std::string_view, 4> kMetricNames = {"f1_train", "spec_train", "f1_test",
                                                          "spec_test"};

// Canonical classifier ordering for reports: members first, ensemble last.
int classifier_rank(const std::string& name) {
    const auto names = ensemble_member_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    if (name == kEnsembleName) return static_cast<int>(names.size());
    return static_cast<int>(names.size()) + 1;
}

}  // namespace

std::vector<SummaryRow> summarize_results(std::istream& results, bool per_iteration) {
    std::map<ScoreKey, std::map<int, RunScores>> grouped;  // key -> run -> scores
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(results, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw InputError("malformed results line", line_no);
        try {
            const ScoreKey key{j.at("classifier").get<std::string>(),
                               j.at("feature_kind").get<std::string>()};
            const int run = j.at("run").get<int>();
            const int t = j.at("iteration").get<int>();
            grouped[key][run].iterations[t] = {
                j.at("f1_train").get<double>(), j.at("spec_train").get<double>(),
                j.at("f1_test").get<double>(), j.at("spec_test").get<double>()};
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("results line missing fields: ") + e.what(), line_no);
        }
    }

    std::vector<SummaryRow> rows;
    std::vector<std::pair<ScoreKey, const std::map<int, RunScores>*>> keys;
    for (const auto& [key, runs] : grouped) keys.emplace_back(key, &runs);
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        if (a.first.feature_kind != b.first.feature_kind) return a.first.feature_kind < b.first.feature_kind;
        const int ra = classifier_rank(a.first.classifier), rb = classifier_rank(b.first.classifier);
        if (ra != rb) return ra < rb;
        return a.first.classifier < b.first.classifier;
    });

    for (const auto& [key, runs] : keys) {
        if (per_iteration) {
            std::map<int, std::array<std::vector<double>, 4>> by_iteration;
            for (const auto& [run, scores] : *runs)
                for (const auto& [t, metrics] : scores.iterations)
                    for (std::size_t m = 0; m < 4; ++m) by_iteration[t][m].push_back(metrics[m]);
            for (auto& [t, metric_values] : by_iteration)
                for (std::size_t m = 0; m < 4; ++m)
                    rows.push_back({key.classifier, key.feature_kind, std::to_string(t),
                                    std::string(kMetricNames[m]), median(metric_values[m])});
        } else {
            std::array<std::vector<double>, 4> finals;
            for (const auto& [run, scores] : *runs) {
                const auto& last = scores.iterations.rbegin()->second;
                for (std::size_t m = 0; m < 4; ++m) finals[m].push_back(last[m]);
            }
            for (std::size_t m = 0; m < 4; ++m)
                rows.push_back({key.classifier, key.feature_kind, "final",
                                std::string(kMetricNames[m]), median(finals[m])});
        }
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& sink) {
    sink << "classifier,feature_kind,iteration,metric,median\n";
    for (const auto& row : rows)
        sink << row.classifier << ',' << row.feature_kind << ',' << row.iteration << ',' << row.metric
             << ',' << format_double(row.value) << '\n';
    if (!sink) throw IoError("summary write failed");
}

IngestReport ingest_logs(const fs::path& log_dir, const fs::path& out_dir, bool strict) {
    if (!fs::is_directory(log_dir)) throw InputError(log_dir.string() + " is not a directory");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(log_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    IngestReport report;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw InputError("cannot read " + file.string());
        ParseOptions options;
        options.strict = strict;
        std::string stem = file.filename().string();
        if (const auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
        options.default_app = stem;
        ParseResult parsed;
        try {
            parsed = parse_trace_log(in, options);
        } catch (const InputError& e) {
            throw InputError(file.string() + ": " + e.what());
        }

        const fs::path out_path = out_dir / (stem + ".trace.jsonl");
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + out_path.string());
        for (const auto& trace : parsed.traces) {
            write_trace(trace, out);
            report.calls += static_cast<long>(trace.calls.size());
        }
        report.traces += static_cast<long>(parsed.traces.size());
        report.skipped += static_cast<long>(parsed.skipped);
        ++report.files;
    }
    return report;
}

}  // namespace graftbench
