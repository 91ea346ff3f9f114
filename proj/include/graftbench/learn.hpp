#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "graftbench/corpus.hpp"

namespace graftbench {

using Row = std::vector<double>;
using Rows = std::vector<Row>;

struct ClassifierSpec {
    enum class Kind { Knn, RandomForest, LinearSvm };
    Kind kind = Kind::Knn;
    int k = 1;           // KNN neighbours
    int estimators = 1;  // forest size
    std::int64_t seed = 0;

    static ClassifierSpec knn(int k);
    static ClassifierSpec random_forest(int estimators, std::int64_t seed);
    static ClassifierSpec linear_svm();
};

// Per-feature mean/stddev standardization (population stddev). Features with
// zero spread standardize to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    Row apply(std::span<const double> x) const;
    Rows apply_all(const Rows& rows) const;
};

Standardizer fit_standardizer(const Rows& rows);

struct KnnModel {
    int k = 1;  // clamped to the training size
    Rows rows;
    std::vector<Label> labels;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // x[feature] < threshold goes left
    int left = -1;
    int right = -1;
    Label leaf = Label::Benign;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    Label predict(std::span<const double> x) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
};

struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
};

class Classifier {
public:
    Classifier() = default;
    Classifier(ClassifierSpec spec, std::variant<KnnModel, ForestModel, SvmModel> model)
        : spec_(std::move(spec)), model_(std::move(model)) {}

    Label predict(std::span<const double> x) const;
    const ClassifierSpec& spec() const { return spec_; }
    const std::variant<KnnModel, ForestModel, SvmModel>& model() const { return model_; }

private:
    ClassifierSpec spec_;
    std::variant<KnnModel, ForestModel, SvmModel> model_;
};

// KNN: majority of the k nearest rows by Euclidean distance, distance ties by
// lower row index, vote ties -> malicious; k is clamped to |X|.
// RandomForest: `estimators` CART trees on bootstrap samples, Gini criterion,
// floor(sqrt(d)) candidate features per split, grown until pure or < 2 rows;
// per-tree seed derived from spec.seed.
// LinearSvm: hinge loss + L2 via epoch-ordered subgradient descent (epochs
// 200, lambda 1e-3, step 1/(lambda*t)); predicts malicious when the affine
// score is >= 0.
Classifier train(const ClassifierSpec& spec, const Rows& X, const std::vector<Label>& y);

inline constexpr std::array<int, 6> kEnsembleKnnSizes = {10, 25, 50, 100, 250, 500};
inline constexpr std::array<int, 5> kEnsembleForestSizes = {10, 25, 50, 75, 100};
inline constexpr int kEnsembleSize = 12;

// "KNN10".."KNN500", "Trees10".."Trees100", "SVM".
std::vector<std::string> ensemble_member_names();

struct EnsembleModel {
    Standardizer standardizer;
    std::vector<Classifier> members;  // exactly kEnsembleSize, canonical order

    // Raw (unstandardized) input; standardization is applied internally.
    std::array<Label, kEnsembleSize> member_votes(std::span<const double> x) const;
};

EnsembleModel train_ensemble(const Rows& X, const std::vector<Label>& y, std::int64_t seed);

// Malicious iff at least half of the votes are malicious (6-6 -> malicious).
Label combine_votes(std::span<const Label> votes);
Label predict_ensemble(const EnsembleModel& model, std::span<const double> x);

struct Metrics {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0, recall = 0, f1 = 0, specificity = 0, accuracy = 0;
    // Set when the metric's denominator was zero and the value was pinned to 0.
    bool precision_zero_division = false;
    bool recall_zero_division = false;
    bool f1_zero_division = false;
    bool specificity_zero_division = false;
};

// Malicious is the positive class.
Metrics evaluate(std::span<const Label> predictions, std::span<const Label> truth);

// Versioned JSON serialization with enough state for bit-exact reload.
std::string ensemble_to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const std::string& text);

}  // namespace graftbench
