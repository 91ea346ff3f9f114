#include "graftbench/activeloop.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "graftbench/errors.hpp"
#include "graftbench/rng.hpp"

namespace graftbench {

std::string_view experiment_mode_name(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::Static: return "static";
        case ExperimentMode::Dynamic: return "dynamic";
        case ExperimentMode::Active: return "active";
    }
    return "active";
}

ExperimentMode parse_experiment_mode(std::string_view name) {
    if (name == "static") return ExperimentMode::Static;
    if (name == "dynamic") return ExperimentMode::Dynamic;
    if (name == "active") return ExperimentMode::Active;
    throw ConfigError("unknown experiment mode: " + std::string(name));
}

void validate_experiment_config(const ExperimentConfig& config) {
    if (config.split_ratio <= 0.0 || config.split_ratio >= 1.0)
        throw ConfigError("split_ratio must be in (0, 1)");
    if (config.t_max < 1) throw ConfigError("t_max must be >= 1");
    if (config.epsilon < 0.0 || config.epsilon >= 1.0) throw ConfigError("epsilon must be in [0, 1)");
    if (config.runs < 1) throw ConfigError("runs must be >= 1");
    if (config.mode == ExperimentMode::Static) {
        if (!is_static_kind(config.feature_kind))
            throw ConfigError("static experiments need a static feature kind (basic|permission|api|all)");
    } else if (is_static_kind(config.feature_kind)) {
        throw ConfigError("dynamic/active experiments need trace-based features (dynamic|hybrid)");
    }
    if (config.stimulation.max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (config.stimulation.intent_broadcast_probability < 0.0 ||
        config.stimulation.intent_broadcast_probability > 1.0)
        throw ConfigError("intent_broadcast_probability must be in [0, 1]");
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_dataset(
    std::span<const SyntheticApp> apps, double ratio, std::int64_t seed) {
    if (apps.size() < 3) throw ConfigError("split needs at least 3 apps");
    bool has_mal = false, has_ben = false;
    for (const auto& app : apps) (app.label == Label::Malicious ? has_mal : has_ben) = true;
    if (!has_mal || !has_ben) throw ConfigError("split needs both classes present");

    std::vector<std::string> ids;
    ids.reserve(apps.size());
    for (const auto& app : apps) ids.push_back(app.app_id);
    Rng rng(static_cast<std::uint64_t>(seed));
    rng.shuffle(ids);

    // Round half-up keeps splits reproducible across platforms.
    const auto n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(apps.size()) + 0.5));
    if (n_train == 0 || n_train == apps.size())
        throw ConfigError("split ratio leaves one side empty for " + std::to_string(apps.size()) + " apps");
    std::vector<std::string> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::string> test(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    return {std::move(train), std::move(test)};
}

bool should_continue(double f1_curr, double f1_prev, int t, int t_max, double epsilon) {
    if (t < 1) throw ConfigError("iteration index must be >= 1");
    return t < t_max && f1_curr >= f1_prev - epsilon;
}

namespace {

struct AppState {
    const SyntheticApp* app = nullptr;
    std::optional<FeatureVector> static_all;  // cached for hybrid rows
    std::optional<FeatureVector> row;
};

// Re-stimulates one app and replaces its feature row. An empty trace keeps
// the previous row if there is one, otherwise the app stays omitted.
void update_row(AppState& state, const ExperimentConfig& config, std::int64_t run_seed, int iteration) {
    const Trace trace = restimulate(*state.app, config.stimulation, run_seed, iteration);
    if (trace.empty()) return;
    FeatureVector dynamic = extract_dynamic(trace);
    if (config.feature_kind == FeatureKind::Dynamic) {
        state.row = std::move(dynamic);
        return;
    }
    if (!state.static_all) state.static_all = extract_static(*state.app, FeatureKind::All);
    state.row = make_hybrid(*state.static_all, dynamic);
}

struct Assembled {
    Rows X;
    std::vector<Label> y;
    std::vector<std::string> ids;  // apps that contributed a row
};

Assembled assemble(const std::vector<std::string>& ids,
                   const std::unordered_map<std::string, AppState>& states) {
    Assembled out;
    for (const auto& id : ids) {
        const auto& state = states.at(id);
        if (!state.row) continue;
        out.X.push_back(state.row->values);
        out.y.push_back(state.app->label);
        out.ids.push_back(id);
    }
    return out;
}

struct ScoredSplit {
    Metrics ensemble;
    std::vector<Metrics> members;
    std::vector<std::string> misclassified;
};

ScoredSplit score_split(const EnsembleModel& model, const Assembled& data) {
    ScoredSplit out;
    if (data.X.empty()) {
        // Every app on this side was omitted (no usable trace). Scores pin to
        // 0 with the zero-division flags set, mirroring evaluate()'s rule.
        out.ensemble.precision_zero_division = out.ensemble.recall_zero_division = true;
        out.ensemble.f1_zero_division = out.ensemble.specificity_zero_division = true;
        out.members.assign(kEnsembleSize, out.ensemble);
        return out;
    }
    std::vector<Label> ensemble_pred(data.X.size());
    std::vector<std::vector<Label>> member_pred(kEnsembleSize, std::vector<Label>(data.X.size()));
    for (std::size_t i = 0; i < data.X.size(); ++i) {
        const auto votes = model.member_votes(data.X[i]);
        for (int m = 0; m < kEnsembleSize; ++m) member_pred[static_cast<std::size_t>(m)][i] = votes[static_cast<std::size_t>(m)];
        ensemble_pred[i] = combine_votes(votes);
        if (ensemble_pred[i] != data.y[i]) out.misclassified.push_back(data.ids[i]);
    }
    out.ensemble = evaluate(ensemble_pred, data.y);
    out.members.reserve(kEnsembleSize);
    for (const auto& pred : member_pred) out.members.push_back(evaluate(pred, data.y));
    return out;
}

}  // namespace

RunResult run_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                         int run_index, const LoopObserver& observer) {
    validate_experiment_config(config);

    const std::int64_t run_seed = derive_seed(config.master_seed, "run", run_index);
    RunResult result;
    result.run_index = run_index;
    std::tie(result.train_ids, result.test_ids) =
        split_dataset(corpus, config.split_ratio, derive_seed(run_seed, "split", 0));

    std::unordered_map<std::string, AppState> states;
    for (const auto& app : corpus) states[app.app_id] = AppState{&app, std::nullopt, std::nullopt};

    const auto member_names = ensemble_member_names();
    const bool statics = config.mode == ExperimentMode::Static;

    if (statics)
        for (auto& [id, state] : states) state.row = extract_static(*state.app, config.feature_kind);

    double f1_prev = -1.0;
    std::vector<std::string> targets_train = result.train_ids;
    std::vector<std::string> targets_test = result.test_ids;

    for (int t = 1;; ++t) {
        if (!statics) {
            for (const auto& id : targets_train) update_row(states.at(id), config, run_seed, t);
            for (const auto& id : targets_test) update_row(states.at(id), config, run_seed, t);
        }

        const Assembled train_data = assemble(result.train_ids, states);
        const Assembled test_data = assemble(result.test_ids, states);
        if (train_data.X.empty()) throw ConfigError("no usable training rows");

        const EnsembleModel model =
            train_ensemble(train_data.X, train_data.y, derive_seed(run_seed, "ensemble", t));

        const ScoredSplit train_scores = score_split(model, train_data);
        const ScoredSplit test_scores = score_split(model, test_data);

        IterationRecord record;
        record.t = t;
        record.train_metrics = train_scores.ensemble;
        record.test_metrics = test_scores.ensemble;
        record.f1_train = train_scores.ensemble.f1;
        record.spec_train = train_scores.ensemble.specificity;
        record.f1_test = test_scores.ensemble.f1;
        record.spec_test = test_scores.ensemble.specificity;
        record.misclassified_train_ids = train_scores.misclassified;
        record.misclassified_test_ids = test_scores.misclassified;
        record.rows_train = static_cast<int>(train_data.X.size());
        record.rows_test = static_cast<int>(test_data.X.size());
        for (int m = 0; m < kEnsembleSize; ++m)
            record.members.push_back({member_names[static_cast<std::size_t>(m)],
                                      train_scores.members[static_cast<std::size_t>(m)],
                                      test_scores.members[static_cast<std::size_t>(m)]});
        result.iterations.push_back(record);

        const bool more = config.mode == ExperimentMode::Active &&
                          should_continue(record.f1_train, f1_prev, t, config.t_max, config.epsilon);

        if (observer) {
            IterationSnapshot snapshot;
            snapshot.t = t;
            for (const auto& [id, state] : states)
                if (state.row) snapshot.rows.emplace(id, state.row->values);
            snapshot.train_ids = result.train_ids;
            snapshot.test_ids = result.test_ids;
            snapshot.misclassified_train_ids = record.misclassified_train_ids;
            snapshot.misclassified_test_ids = record.misclassified_test_ids;
            snapshot.f1_prev = f1_prev;
            snapshot.continued = more;
            observer(snapshot);
        }

        if (!more) break;
        f1_prev = record.f1_train;
        targets_train = record.misclassified_train_ids;
        targets_test = record.misclassified_test_ids;
    }

    return result;
}

RunResult run_active_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                                int run_index, const LoopObserver& observer) {
    if (config.mode != ExperimentMode::Active)
        throw ConfigError("run_active_experiment needs mode=active");
    return run_experiment(corpus, config, run_index, observer);
}

RunResult run_preliminary_experiment(std::span<const SyntheticApp> corpus, const ExperimentConfig& config,
                                     int run_index) {
    if (config.mode == ExperimentMode::Active)
        throw ConfigError("run_preliminary_experiment needs mode=static or mode=dynamic");
    return run_experiment(corpus, config, run_index);
}

}  // namespace graftbench
