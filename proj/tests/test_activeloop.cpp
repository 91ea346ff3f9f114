#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "graftbench/activeloop.hpp"
#include "graftbench/campaign.hpp"
#include "graftbench/errors.hpp"

using namespace graftbench;

namespace {

std::vector<SyntheticApp> desk_corpus(int n_benign, int n_malicious, std::int64_t seed,
                                      double p_trigger = 0.3) {
    CorpusConfig config = CorpusConfig::defaults();
    config.n_benign = n_benign;
    config.n_malicious = n_malicious;
    config.trigger_null = 0.0;
    config.trigger_probabilistic = 1.0;
    config.trigger_intent = 0.0;
    config.trigger_state = 0.0;
    config.trigger_probability = p_trigger;
    return generate_corpus(config, seed);
}

ExperimentConfig active_config(std::int64_t seed) {
    ExperimentConfig config;
    config.mode = ExperimentMode::Active;
    config.feature_kind = FeatureKind::Dynamic;
    config.master_seed = seed;
    return config;
}

}  // namespace

TEST_CASE("split_dataset: sizes, disjointness, determinism") {
    const auto corpus = desk_corpus(6, 3, 1);
    const auto [train, test] = split_dataset(corpus, 2.0 / 3.0, 7);
    CHECK(train.size() == 6);
    CHECK(test.size() == 3);

    std::set<std::string> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    CHECK(all.size() == 9);

    const auto [train2, test2] = split_dataset(corpus, 2.0 / 3.0, 7);
    CHECK(train == train2);
    CHECK(test == test2);

    const std::vector<SyntheticApp> two(corpus.begin(), corpus.begin() + 2);
    CHECK_THROWS_AS(split_dataset(two, 0.5, 1), ConfigError);
}

TEST_CASE("split rounding is half-up") {
    const auto corpus = desk_corpus(5, 5, 2);  // 10 apps
    const auto [train, test] = split_dataset(corpus, 0.65, 3);
    CHECK(train.size() == 7);  // 6.5 rounds up
    CHECK(test.size() == 3);
}

TEST_CASE("should_continue implements the drop rule with f1_prev = -1 start") {
    CHECK(should_continue(0.5, -1.0, 1, 10, 0.01));
    CHECK_FALSE(should_continue(0.70, 0.80, 3, 10, 0.01));  // drop 0.10 > eps
    CHECK(should_continue(0.795, 0.80, 3, 10, 0.01));       // drop within eps
    CHECK_FALSE(should_continue(0.99, 0.5, 10, 10, 0.01));  // cap reached
    CHECK(should_continue(0.0, -1.0, 9, 10, 0.0));
    CHECK_THROWS_AS(should_continue(0.5, 0.5, 0, 10, 0.01), ConfigError);
}

TEST_CASE("experiment config validation rejects mode/kind mismatches") {
    ExperimentConfig config = active_config(1);
    config.mode = ExperimentMode::Static;
    config.feature_kind = FeatureKind::Dynamic;
    CHECK_THROWS_AS(validate_experiment_config(config), ConfigError);

    config.mode = ExperimentMode::Dynamic;
    config.feature_kind = FeatureKind::Permission;
    CHECK_THROWS_AS(validate_experiment_config(config), ConfigError);

    config.mode = ExperimentMode::Active;
    config.feature_kind = FeatureKind::Hybrid;
    validate_experiment_config(config);
}

TEST_CASE("one run is deterministic and bounded by t_max") {
    const auto corpus = desk_corpus(30, 30, 5);
    const auto config = active_config(11);
    const auto a = run_active_experiment(corpus, config, 0);
    const auto b = run_active_experiment(corpus, config, 0);

    REQUIRE(!a.iterations.empty());
    CHECK(a.iterations.size() <= 10);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.test_ids == b.test_ids);
    REQUIRE(a.iterations.size() == b.iterations.size());
    for (std::size_t t = 0; t < a.iterations.size(); ++t) {
        CHECK(a.iterations[t].f1_train == b.iterations[t].f1_train);
        CHECK(a.iterations[t].f1_test == b.iterations[t].f1_test);
        CHECK(a.iterations[t].misclassified_train_ids == b.iterations[t].misclassified_train_ids);
    }
    for (const auto& record : a.iterations) {
        CHECK(record.members.size() == 12);
        CHECK(record.rows_train > 0);
        CHECK(record.f1_train >= 0.0);
        CHECK(record.f1_train <= 1.0);
    }
}

TEST_CASE("instrumented run: feedback targeting, split stability, monotone guard") {
    const auto corpus = desk_corpus(25, 25, 21);
    for (std::int64_t seed : {1LL, 2LL, 3LL}) {
        const auto config = active_config(seed);
        std::vector<IterationSnapshot> snapshots;
        const auto run = run_active_experiment(
            corpus, config, 0, [&](const IterationSnapshot& s) { snapshots.push_back(s); });

        // Monotone guard: iteration t+1 only ran because f1_train did not
        // drop more than epsilon below the previous iteration.
        for (std::size_t i = 1; i < run.iterations.size(); ++i) {
            const double prev = i >= 2 ? run.iterations[i - 2].f1_train : -1.0;
            CHECK(run.iterations[i - 1].f1_train >= prev - config.epsilon);
        }
        REQUIRE(!snapshots.empty());
        CHECK(snapshots.size() <= 10);

        // Iteration 1 always continues unless t_max stops it; f1_prev is -1.
        CHECK(snapshots.front().f1_prev == -1.0);

        for (std::size_t i = 1; i < snapshots.size(); ++i) {
            const auto& prev = snapshots[i - 1];
            const auto& cur = snapshots[i];
            CHECK(cur.t == prev.t + 1);
            CHECK(cur.train_ids == prev.train_ids);
            CHECK(cur.test_ids == prev.test_ids);

            // Only apps misclassified at t may have changed rows at t+1.
            std::set<std::string> allowed(prev.misclassified_train_ids.begin(),
                                          prev.misclassified_train_ids.end());
            allowed.insert(prev.misclassified_test_ids.begin(), prev.misclassified_test_ids.end());
            for (const auto& [id, row] : cur.rows) {
                const auto it = prev.rows.find(id);
                if (it == prev.rows.end()) continue;
                if (!allowed.count(id)) CHECK(row == it->second);
            }

            // The guard never lets a >epsilon drop continue.
            const double f1_prev_train = prev.rows.empty() ? 0.0 : 0.0;
            (void)f1_prev_train;
        }
        // The last snapshot is where the loop decided to stop (or hit t_max).
        CHECK(!snapshots.back().continued);
    }
}

TEST_CASE("preliminary dynamic equals active iteration 1 for the same seed") {
    const auto corpus = desk_corpus(20, 20, 8);
    auto config = active_config(33);
    const auto active = run_active_experiment(corpus, config, 4);

    config.mode = ExperimentMode::Dynamic;
    const auto preliminary = run_preliminary_experiment(corpus, config, 4);
    REQUIRE(preliminary.iterations.size() == 1);
    CHECK(preliminary.train_ids == active.train_ids);
    CHECK(preliminary.iterations[0].f1_train == active.iterations[0].f1_train);
    CHECK(preliminary.iterations[0].f1_test == active.iterations[0].f1_test);
    CHECK(preliminary.iterations[0].misclassified_train_ids ==
          active.iterations[0].misclassified_train_ids);
}

TEST_CASE("static mode: one iteration, no stimulation, static kinds") {
    const auto corpus = desk_corpus(15, 15, 13);
    ExperimentConfig config;
    config.mode = ExperimentMode::Static;
    config.feature_kind = FeatureKind::Permission;
    config.master_seed = 2;
    std::vector<IterationSnapshot> snapshots;
    const auto run = run_experiment(corpus, config, 0,
                                    [&](const IterationSnapshot& s) { snapshots.push_back(s); });
    REQUIRE(run.iterations.size() == 1);
    CHECK(run.iterations[0].rows_train == 20);
    CHECK(run.iterations[0].rows_test == 10);
    REQUIRE(snapshots.size() == 1);
    for (const auto& [id, row] : snapshots.front().rows) CHECK(row.size() == 4);

    config.feature_kind = FeatureKind::Dynamic;
    CHECK_THROWS_AS(run_preliminary_experiment(corpus, config, 0), ConfigError);
}

TEST_CASE("apps with empty traces are omitted; empty re-traces keep the old row") {
    // Two extra hand-built apps: one silent (never produces calls), one whose
    // entry branch can yield an empty path.
    auto corpus = desk_corpus(12, 12, 44);
    SyntheticApp silent;
    silent.app_id = "silent";
    silent.cfg.entry = 0;
    silent.cfg.blocks.push_back({0, {}, false});
    corpus.push_back(silent);

    const auto config = active_config(3);
    const auto run = run_active_experiment(corpus, config, 0);
    for (const auto& record : run.iterations) {
        CHECK(record.rows_train + record.rows_test == 24);  // silent app never usable
        for (const auto& id : record.misclassified_train_ids) CHECK(id != "silent");
    }
}

TEST_CASE("feedback lifts dynamic test F1 on a probabilistic-trigger corpus") {
    // 200 apps, Probabilistic(0.3) triggers, 11 runs: the median test F1 at
    // the stopping iteration beats iteration 1 (the feedback-disabled
    // baseline) by at least 5 points.
    const auto corpus = desk_corpus(100, 100, 1234);
    auto config = active_config(99);
    config.runs = 11;
    std::vector<double> first, final_;
    for (int r = 0; r < config.runs; ++r) {
        const auto run = run_experiment(corpus, config, r);
        first.push_back(run.iterations.front().f1_test);
        final_.push_back(run.iterations.back().f1_test);
    }
    CHECK(median(final_) - median(first) >= 0.05);
}

TEST_CASE("run aborts only on invariant violations, never on poor scores") {
    // A corpus whose dynamic vectors are pure noise still completes.
    auto corpus = desk_corpus(10, 10, 50, 0.0);  // triggers never fire
    const auto config = active_config(9);
    const auto run = run_active_experiment(corpus, config, 1);
    CHECK(!run.iterations.empty());
}
