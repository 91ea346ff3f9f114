#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graftbench/features.hpp"
#include "graftbench/learn.hpp"
#include "graftbench/stimulator.hpp"

namespace graftbench {

enum class ExperimentMode { Static, Dynamic, Active };

std::string_view experiment_mode_name(ExperimentMode mode);
ExperimentMode parse_experiment_mode(std::string_view name);

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Active;
    FeatureKind feature_kind = FeatureKind::Dynamic;
    double split_ratio = 2.0 / 3.0;
    int t_max = 10;
    double epsilon = 0.01;
    int runs = 25;
    std::int64_t master_seed = 0;
    StimulationConfig stimulation;
};

void validate_experiment_config(const ExperimentConfig& config);

struct MemberScores {
    std::string name;
    Metrics train;
    Metrics test;
};

struct IterationRecord {
    int t = 1;
    double f1_train = 0, spec_train = 0, f1_test = 0, spec_test = 0;  // ensemble
    Metrics train_metrics;
    Metrics test_metrics;
    std::vector<std::string> misclassified_train_ids;
    std::vector<std::string> misclassified_test_ids;
    int rows_train = 0;
    int rows_test = 0;
    std::vector<MemberScores> members;
};

struct RunResult {
    int run_index = 0;
    std::vector<std::string> train_ids;  // split membership, constant across iterations
    std::vector<std::string> test_ids;
    std::vector<IterationRecord> iterations;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RunResult> runs;
};

// Deterministic shuffle split; |train| = round-half-up(ratio * n). Requires
// at least 3 apps and both classes present.
std::pair<std::vector<std::string>, std::vector<std::string>> split_dataset(
    std::span<const SyntheticApp> apps, double ratio, std::int64_t seed);

// Continue while under the iteration cap and the training F1 has not dropped
// by more than epsilon. f1_prev starts at -1, so iteration 1 always passes.
bool should_continue(double f1_curr, double f1_prev, int t, int t_max, double epsilon);

// Snapshot handed to observers after each iteration; used by instrumented
// fidelity checks.
struct IterationSnapshot {
    int t = 1;
    std::map<std::string, Row> rows;  // app_id -> current feature row (train + test)
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<std::string> misclassified_train_ids;
    std::vector<std::string> misclassified_test_ids;
    double f1_prev = -1.0;
    bool continued = false;
};

using LoopObserver = std::function<void(const IterationSnapshot&)>;

// One seeded run of the experiment workflow: split, stimulate/extract, train
// the ensemble, score, then re-stimulate only the misclassified apps until
// should_continue says stop. Static/dynamic modes perform exactly one
// iteration.
RunResult run_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                         int run_index, const LoopObserver& observer = {});

// Convenience wrappers matching the experiment families.
RunResult run_active_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                                int run_index, const LoopObserver& observer = {});
RunResult run_preliminary_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                                     int run_index);

}  // namespace graftbench
