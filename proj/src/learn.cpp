#include "graftbench/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "graftbench/errors.hpp"
#include "graftbench/rng.hpp"

namespace graftbench {

ClassifierSpec ClassifierSpec::knn(int k) {
    if (k < 1) throw ConfigError("KNN needs k >= 1");
    return {Kind::Knn, k, 0, 0};
}

ClassifierSpec ClassifierSpec::random_forest(int estimators, std::int64_t seed) {
    if (estimators < 1) throw ConfigError("random forest needs estimators >= 1");
    return {Kind::RandomForest, 1, estimators, seed};
}

ClassifierSpec ClassifierSpec::linear_svm() {
    return {Kind::LinearSvm, 1, 1, 0};
}

Standardizer fit_standardizer(const Rows& rows) {
    if (rows.empty()) throw ConfigError("cannot fit a standardizer on an empty matrix");
    const std::size_t dim = rows.front().size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dim) throw ConfigError("ragged feature matrix");
        for (std::size_t j = 0; j < dim; ++j) s.mean[j] += row[j];
    }
    for (double& m : s.mean) m /= static_cast<double>(rows.size());
    for (const auto& row : rows)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = row[j] - s.mean[j];
            s.stddev[j] += d * d;
        }
    for (double& v : s.stddev) v = std::sqrt(v / static_cast<double>(rows.size()));
    return s;
}

Row Standardizer::apply(std::span<const double> x) const {
    if (x.size() != mean.size()) throw ConfigError("standardizer dimension mismatch");
    Row out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = stddev[j] == 0.0 ? 0.0 : (x[j] - mean[j]) / stddev[j];
    return out;
}

Rows Standardizer::apply_all(const Rows& rows) const {
    Rows out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(apply(row));
    return out;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

Label majority_or_malicious(long malicious, long benign) {
    return malicious >= benign ? Label::Malicious : Label::Benign;
}

Label knn_predict(const KnnModel& m, std::span<const double> x) {
    if (x.size() != m.rows.front().size()) throw ConfigError("KNN dimension mismatch");
    std::vector<std::pair<double, std::size_t>> by_distance(m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        by_distance[i] = {squared_distance(m.rows[i], x), i};
    const auto k = static_cast<std::size_t>(m.k);
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k),
                      by_distance.end());  // pair ordering breaks distance ties by lower index
    long malicious = 0, benign = 0;
    for (std::size_t i = 0; i < k; ++i)
        (m.labels[by_distance[i].second] == Label::Malicious ? malicious : benign)++;
    return majority_or_malicious(malicious, benign);
}

struct TreeBuilder {
    const Rows& X;
    const std::vector<Label>& y;
    std::size_t n_candidates;
    Rng& rng;
    std::vector<TreeNode> nodes;

    static double gini(long malicious, long total) {
        if (total == 0) return 0.0;
        const double p = static_cast<double>(malicious) / static_cast<double>(total);
        return 2.0 * p * (1.0 - p);
    }

    int build(std::vector<std::size_t>& indices) {
        long malicious = 0;
        for (auto i : indices)
            if (y[i] == Label::Malicious) ++malicious;
        const long total = static_cast<long>(indices.size());

        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (malicious == 0 || malicious == total || total < 2) {
            nodes[static_cast<std::size_t>(node_id)].leaf = majority_or_malicious(malicious, total - malicious);
            return node_id;
        }

        // Sample candidate features without replacement.
        const std::size_t dim = X.front().size();
        std::vector<std::size_t> features(dim);
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t i = 0; i < n_candidates && i + 1 < dim; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(dim - i));
            std::swap(features[i], features[j]);
        }

        const double parent = gini(malicious, total);
        double best_impurity = parent - 1e-12;
        std::size_t best_feature = 0;
        double best_threshold = 0;
        bool found = false;

        std::vector<std::pair<double, Label>> column(indices.size());
        for (std::size_t c = 0; c < std::min(n_candidates, dim); ++c) {
            const std::size_t f = features[c];
            for (std::size_t i = 0; i < indices.size(); ++i)
                column[i] = {X[indices[i]][f], y[indices[i]]};
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            long left_mal = 0, left_total = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                if (column[i].second == Label::Malicious) ++left_mal;
                ++left_total;
                if (column[i].first == column[i + 1].first) continue;
                const long right_total = total - left_total;
                const long right_mal = malicious - left_mal;
                const double impurity =
                    (static_cast<double>(left_total) * gini(left_mal, left_total) +
                     static_cast<double>(right_total) * gini(right_mal, right_total)) /
                    static_cast<double>(total);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
                    found = true;
                }
            }
        }

        if (!found) {  // all candidates constant or no impurity reduction
            nodes[static_cast<std::size_t>(node_id)].leaf = majority_or_malicious(malicious, total - malicious);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (auto i : indices)
            (X[i][best_feature] < best_threshold ? left : right).push_back(i);
        nodes[static_cast<std::size_t>(node_id)].feature = static_cast<int>(best_feature);
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const int l = build(left);
        nodes[static_cast<std::size_t>(node_id)].left = l;
        const int r = build(right);
        nodes[static_cast<std::size_t>(node_id)].right = r;
        return node_id;
    }
};

DecisionTree build_tree(const Rows& X, const std::vector<Label>& y, std::int64_t seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const std::size_t n = X.size();
    std::vector<std::size_t> sample(n);
    for (auto& i : sample) i = static_cast<std::size_t>(rng.next_below(n));
    std::sort(sample.begin(), sample.end());

    const auto dim = X.front().size();
    TreeBuilder builder{X, y, std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim)))),
                        rng, {}};
    builder.build(sample);
    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

Label svm_score_label(const SvmModel& m, std::span<const double> x) {
    if (x.size() != m.weights.size()) throw ConfigError("SVM dimension mismatch");
    double score = m.bias;
    for (std::size_t j = 0; j < x.size(); ++j) score += m.weights[j] * x[j];
    return score >= 0.0 ? Label::Malicious : Label::Benign;
}

SvmModel train_svm(const Rows& X, const std::vector<Label>& y) {
    constexpr int kEpochs = 200;
    constexpr double kLambda = 1e-3;
    const std::size_t n = X.size();
    const std::size_t dim = X.front().size();
    SvmModel m;
    m.weights.assign(dim, 0.0);
    long step = 0;
    for (int epoch = 0; epoch < kEpochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            ++step;
            const double eta = 1.0 / (kLambda * static_cast<double>(step));
            const double yi = y[i] == Label::Malicious ? 1.0 : -1.0;
            double score = m.bias;
            for (std::size_t j = 0; j < dim; ++j) score += m.weights[j] * X[i][j];
            const double scale = 1.0 - eta * kLambda;
            for (double& w : m.weights) w *= scale;
            m.bias *= scale;  // L2 covers the full affine parameter vector
            if (yi * score < 1.0) {
                for (std::size_t j = 0; j < dim; ++j) m.weights[j] += eta * yi * X[i][j];
                m.bias += eta * yi;
            }
        }
    }
    return m;
}

void require_both_classes(const std::vector<Label>& y, const char* who) {
    const bool has_mal = std::find(y.begin(), y.end(), Label::Malicious) != y.end();
    const bool has_ben = std::find(y.begin(), y.end(), Label::Benign) != y.end();
    if (!has_mal || !has_ben) throw ConfigError(std::string(who) + " needs at least one row of each class");
}

}  // namespace

Label DecisionTree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf;
}

Classifier train(const ClassifierSpec& spec, const Rows& X, const std::vector<Label>& y) {
    if (X.empty() || X.size() != y.size()) throw ConfigError("training data is empty or ragged");
    switch (spec.kind) {
        case ClassifierSpec::Kind::Knn: {
            if (spec.k < 1) throw ConfigError("KNN needs k >= 1");
            KnnModel m;
            m.k = std::min<int>(spec.k, static_cast<int>(X.size()));
            m.rows = X;
            m.labels = y;
            return {spec, std::move(m)};
        }
        case ClassifierSpec::Kind::RandomForest: {
            require_both_classes(y, "random forest");
            ForestModel m;
            m.trees.reserve(static_cast<std::size_t>(spec.estimators));
            for (int t = 0; t < spec.estimators; ++t)
                m.trees.push_back(build_tree(X, y, derive_seed(spec.seed, "tree", t)));
            return {spec, std::move(m)};
        }
        case ClassifierSpec::Kind::LinearSvm: {
            require_both_classes(y, "linear SVM");
            return {spec, train_svm(X, y)};
        }
    }
    throw ConfigError("unknown classifier kind");
}

Label Classifier::predict(std::span<const double> x) const {
    if (std::holds_alternative<KnnModel>(model_)) return knn_predict(std::get<KnnModel>(model_), x);
    if (std::holds_alternative<ForestModel>(model_)) {
        const auto& forest = std::get<ForestModel>(model_);
        long malicious = 0;
        for (const auto& tree : forest.trees)
            if (tree.predict(x) == Label::Malicious) ++malicious;
        return majority_or_malicious(malicious, static_cast<long>(forest.trees.size()) - malicious);
    }
    return svm_score_label(std::get<SvmModel>(model_), x);
}

std::vector<std::string> ensemble_member_names() {
    std::vector<std::string> names;
    for (int k : kEnsembleKnnSizes) names.push_back("KNN" + std::to_string(k));
    for (int e : kEnsembleForestSizes) names.push_back("Trees" + std::to_string(e));
    names.push_back("SVM");
    return names;
}

EnsembleModel train_ensemble(const Rows& X, const std::vector<Label>& y, std::int64_t seed) {
    EnsembleModel model;
    model.standardizer = fit_standardizer(X);
    const Rows Z = model.standardizer.apply_all(X);
    model.members.reserve(kEnsembleSize);
    int member = 0;
    for (int k : kEnsembleKnnSizes) {
        auto spec = ClassifierSpec::knn(k);
        spec.seed = derive_seed(seed, "member", member++);
        model.members.push_back(train(spec, Z, y));
    }
    for (int e : kEnsembleForestSizes) {
        auto spec = ClassifierSpec::random_forest(e, derive_seed(seed, "member", member++));
        model.members.push_back(train(spec, Z, y));
    }
    auto spec = ClassifierSpec::linear_svm();
    spec.seed = derive_seed(seed, "member", member++);
    model.members.push_back(train(spec, Z, y));
    return model;
}

std::array<Label, kEnsembleSize> EnsembleModel::member_votes(std::span<const double> x) const {
    const Row z = standardizer.apply(x);
    std::array<Label, kEnsembleSize> votes{};
    for (std::size_t i = 0; i < members.size(); ++i) votes[i] = members[i].predict(z);
    return votes;
}

Label combine_votes(std::span<const Label> votes) {
    long malicious = 0;
    for (Label v : votes)
        if (v == Label::Malicious) ++malicious;
    return 2 * malicious >= static_cast<long>(votes.size()) ? Label::Malicious : Label::Benign;
}

Label predict_ensemble(const EnsembleModel& model, std::span<const double> x) {
    const auto votes = model.member_votes(x);
    return combine_votes(votes);
}

Metrics evaluate(std::span<const Label> predictions, std::span<const Label> truth) {
    if (predictions.empty()) throw ConfigError("evaluate needs at least one prediction");
    if (predictions.size() != truth.size()) throw ConfigError("predictions and truth differ in length");
    Metrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_mal = predictions[i] == Label::Malicious;
        const bool true_mal = truth[i] == Label::Malicious;
        if (pred_mal && true_mal) ++m.tp;
        else if (pred_mal && !true_mal) ++m.fp;
        else if (!pred_mal && true_mal) ++m.fn;
        else ++m.tn;
    }
    auto ratio = [](long num, long den, bool& flag) {
        if (den == 0) {
            flag = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(m.tp, m.tp + m.fp, m.precision_zero_division);
    m.recall = ratio(m.tp, m.tp + m.fn, m.recall_zero_division);
    if (m.precision + m.recall == 0.0) {
        m.f1_zero_division = true;
        m.f1 = 0.0;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    m.specificity = ratio(m.tn, m.tn + m.fp, m.specificity_zero_division);
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(predictions.size());
    return m;
}

namespace {

using json = nlohmann::json;

json classifier_to_json(const Classifier& c) {
    json j;
    const auto& spec = c.spec();
    switch (spec.kind) {
        case ClassifierSpec::Kind::Knn: {
            const auto& m = std::get<KnnModel>(c.model());
            j["kind"] = "knn";
            j["k"] = spec.k;
            j["k_effective"] = m.k;
            j["rows"] = m.rows;
            json labels = json::array();
            for (Label l : m.labels) labels.push_back(std::string(label_name(l)));
            j["labels"] = std::move(labels);
            break;
        }
        case ClassifierSpec::Kind::RandomForest: {
            const auto& m = std::get<ForestModel>(c.model());
            j["kind"] = "random_forest";
            j["estimators"] = spec.estimators;
            j["seed"] = spec.seed;
            json trees = json::array();
            for (const auto& tree : m.trees) {
                json nodes = json::array();
                for (const auto& n : tree.nodes)
                    nodes.push_back(json{{"feature", n.feature},
                                         {"threshold", n.threshold},
                                         {"left", n.left},
                                         {"right", n.right},
                                         {"leaf", std::string(label_name(n.leaf))}});
                trees.push_back(std::move(nodes));
            }
            j["trees"] = std::move(trees);
            break;
        }
        case ClassifierSpec::Kind::LinearSvm: {
            const auto& m = std::get<SvmModel>(c.model());
            j["kind"] = "linear_svm";
            j["weights"] = m.weights;
            j["bias"] = m.bias;
            break;
        }
    }
    return j;
}

Classifier classifier_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "knn") {
        ClassifierSpec spec = ClassifierSpec::knn(j.at("k").get<int>());
        KnnModel m;
        m.k = j.at("k_effective").get<int>();
        m.rows = j.at("rows").get<Rows>();
        for (const auto& l : j.at("labels")) m.labels.push_back(parse_label(l.get<std::string>()));
        return {spec, std::move(m)};
    }
    if (kind == "random_forest") {
        ClassifierSpec spec =
            ClassifierSpec::random_forest(j.at("estimators").get<int>(), j.at("seed").get<std::int64_t>());
        ForestModel m;
        for (const auto& tree_json : j.at("trees")) {
            DecisionTree tree;
            for (const auto& n : tree_json)
                tree.nodes.push_back(TreeNode{n.at("feature").get<int>(), n.at("threshold").get<double>(),
                                              n.at("left").get<int>(), n.at("right").get<int>(),
                                              parse_label(n.at("leaf").get<std::string>())});
            m.trees.push_back(std::move(tree));
        }
        return {spec, std::move(m)};
    }
    if (kind == "linear_svm") {
        SvmModel m;
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        return {ClassifierSpec::linear_svm(), std::move(m)};
    }
    throw InputError("unknown classifier kind in model JSON: " + kind);
}

}  // namespace

std::string ensemble_to_json(const EnsembleModel& model) {
    json j;
    j["format"] = "graftbench-ensemble";
    j["version"] = 1;
    j["standardizer"] = json{{"mean", model.standardizer.mean}, {"stddev", model.standardizer.stddev}};
    json members = json::array();
    for (const auto& member : model.members) members.push_back(classifier_to_json(member));
    j["members"] = std::move(members);
    return j.dump();
}

EnsembleModel ensemble_from_json(const std::string& text) {
    const auto j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("malformed model JSON");
    if (j.at("version").get<int>() != 1) throw InputError("unsupported model version");
    EnsembleModel model;
    model.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
    for (const auto& member : j.at("members")) model.members.push_back(classifier_from_json(member));
    if (model.members.size() != kEnsembleSize)
        throw InputError("model JSON does not contain " + std::to_string(kEnsembleSize) + " members");
    return model;
}

}  // namespace graftbench
