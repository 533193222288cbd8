#ifndef PLACEMETRICS_FOREST_HPP
#define PLACEMETRICS_FOREST_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "stats.hpp"

/**
 * @file forest.hpp
 *
 * Random Forest over binary item responses: Gini CART trees grown on
 * bootstrap resamples, majority vote, mean-decrease-in-impurity and
 * permutation importance, the cut-score baseline, stratified k-fold
 * cross-validation and support-weighted classification metrics.
 */

namespace placemetrics::forest {

/// Row-major 0/1 features plus label ranks; the training-time view of a ResponseMatrix.
struct Dataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> x;
    std::vector<std::uint8_t> y;

    static Dataset from(const ResponseMatrix& matrix) {
        matrix.require_labels();
        Dataset d;
        d.rows = matrix.student_count();
        d.cols = matrix.item_count();
        d.x.reserve(d.rows * d.cols);
        d.y.reserve(d.rows);
        for (const auto& s : matrix.students()) {
            d.x.insert(d.x.end(), s.responses.begin(), s.responses.end());
            d.y.push_back(static_cast<std::uint8_t>(rank(*s.label)));
        }
        return d;
    }

    std::uint8_t at(std::size_t row, std::size_t col) const { return x[row * cols + col]; }
    std::span<const std::uint8_t> row(std::size_t r) const { return {x.data() + r * cols, cols}; }

    LabelCounts class_counts() const {
        LabelCounts c{};
        for (auto label : y) {
            ++c[label];
        }
        return c;
    }
};

/// Gini impurity 1 - sum (n_k / n)^2.
inline double gini(std::span<const std::size_t> class_counts) {
    std::size_t n = 0;
    for (auto c : class_counts) {
        n += c;
    }
    if (n == 0) {
        throw Error(ErrorKind::Domain, "gini of an empty node");
    }
    double sum_sq = 0.0;
    for (auto c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

/// argmax of counts; ties go to the larger prior, then the lower rank.
inline PlacementLabel resolve_majority(const LabelCounts& counts, const LabelCounts& prior) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kLabelCount; ++k) {
        if (counts[k] > counts[best] || (counts[k] == counts[best] && prior[k] > prior[best])) {
            best = k;
        }
    }
    return label_from_rank(best);
}

struct SplitChoice {
    std::size_t feature = 0;
    double gain = 0.0;  ///< weighted Gini decrease at this node
};

namespace detail {

__extension__ using u128 = unsigned __int128;

// Weighted child purity sum_k cL^2 / nL + sum_k cR^2 / nR kept as an exact fraction.
struct SplitScore {
    u128 num = 0;
    u128 den = 1;
};

inline std::uint64_t sum_squares(const LabelCounts& c) {
    std::uint64_t s = 0;
    for (auto v : c) {
        s += static_cast<std::uint64_t>(v) * v;
    }
    return s;
}

} // namespace detail

/**
 * Best binary split (x = 0 left, x = 1 right) among `candidates` for the
 * given sample multiset. Gains are compared as exact rationals, so equal
 * gains tie exactly and resolve to the lowest feature index. Returns
 * nothing when no candidate has strictly positive gain.
 */
inline std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                             std::span<const std::size_t> candidates) {
    if (samples.empty()) {
        return std::nullopt;
    }
    LabelCounts parent{};
    for (auto s : samples) {
        ++parent[data.y[s]];
    }
    const std::uint64_t n = samples.size();
    const std::uint64_t parent_sq = detail::sum_squares(parent);

    std::vector<std::size_t> order(candidates.begin(), candidates.end());
    std::sort(order.begin(), order.end());

    std::optional<SplitChoice> best;
    detail::SplitScore best_score;
    for (std::size_t f : order) {
        LabelCounts right{};
        for (auto s : samples) {
            if (data.at(s, f) != 0) {
                ++right[data.y[s]];
            }
        }
        LabelCounts left{};
        std::uint64_t n_right = 0;
        for (std::size_t k = 0; k < kLabelCount; ++k) {
            left[k] = parent[k] - right[k];
            n_right += right[k];
        }
        const std::uint64_t n_left = n - n_right;
        if (n_left == 0 || n_right == 0) {
            continue;
        }
        const detail::SplitScore score{
            detail::u128(detail::sum_squares(left)) * n_right + detail::u128(detail::sum_squares(right)) * n_left,
            detail::u128(n_left) * n_right};
        // positive gain: score > parent_sq / n
        if (score.num * n <= detail::u128(parent_sq) * score.den) {
            continue;
        }
        if (best && score.num * best_score.den <= best_score.num * score.den) {
            continue;
        }
        const double purity = static_cast<double>(score.num) / static_cast<double>(score.den);
        const double gain = (purity - static_cast<double>(parent_sq) / static_cast<double>(n)) / static_cast<double>(n);
        best = SplitChoice{f, gain};
        best_score = score;
    }
    return best;
}

struct Hyperparams {
    std::size_t n_estimators = 200;
    std::size_t max_depth = 10;
    std::size_t min_samples_split = 5;
    /// Candidate features per node; default ceil(sqrt(m)).
    std::optional<std::size_t> mtry{};
    /// Train on bootstrap resamples of size n; off grows every tree on the full data.
    bool bootstrap = true;

    std::size_t resolved_mtry(std::size_t item_count) const {
        const std::size_t value =
            mtry.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(item_count)))));
        return std::clamp<std::size_t>(value, 1, item_count);
    }

    bool operator==(const Hyperparams&) const = default;
};

struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;
    std::int32_t left = -1;
    std::int32_t right = -1;
    LabelCounts class_counts{};
    PlacementLabel prediction = PlacementLabel::CollegeAlgebra;
    double samples_fraction = 0.0;  ///< node samples / root samples
    double impurity_decrease = 0.0;

    bool is_leaf() const noexcept { return feature == kLeaf; }
    bool operator==(const TreeNode&) const = default;
};

/// Flat tree; node 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    PlacementLabel predict(std::span<const std::uint8_t> row) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            const auto& node = nodes[i];
            i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] != 0 ? node.right : node.left);
        }
        return nodes[i].prediction;
    }

    std::size_t depth() const {
        std::size_t deepest = 0;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            deepest = std::max(deepest, d);
            if (!nodes[i].is_leaf()) {
                stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
                stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
            }
        }
        return deepest;
    }

    bool operator==(const Tree&) const = default;
};

struct ForestModel {
    std::vector<Tree> trees;
    std::vector<std::uint64_t> per_tree_seed;
    Hyperparams hyperparams;  ///< mtry always resolved
    std::uint64_t seed = 0;
    std::size_t item_count = 0;
    LabelCounts class_prior{};
    std::vector<double> mdi_importance;

    bool operator==(const ForestModel&) const = default;
};

namespace detail {

struct PendingNode {
    std::size_t index;
    std::size_t depth;
    std::vector<std::size_t> samples;
};

inline Tree grow_tree(const Dataset& data, std::vector<std::size_t> samples, const Hyperparams& hp, std::size_t mtry,
                      const LabelCounts& prior, rng::Engine& engine) {
    Tree tree;
    const double root_size = static_cast<double>(samples.size());
    std::vector<std::size_t> features(data.cols);
    std::iota(features.begin(), features.end(), std::size_t{0});

    tree.nodes.emplace_back();
    std::vector<PendingNode> stack;
    stack.push_back({0, 0, std::move(samples)});
    while (!stack.empty()) {
        PendingNode pending = std::move(stack.back());
        stack.pop_back();

        LabelCounts counts{};
        for (auto s : pending.samples) {
            ++counts[data.y[s]];
        }
        {
            auto& node = tree.nodes[pending.index];
            node.class_counts = counts;
            node.prediction = resolve_majority(counts, prior);
            node.samples_fraction = static_cast<double>(pending.samples.size()) / root_size;
        }
        const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        if (pure || pending.depth >= hp.max_depth || pending.samples.size() < hp.min_samples_split) {
            continue;
        }

        // Partial Fisher-Yates: the first mtry slots become the candidate set.
        for (std::size_t i = 0; i < mtry; ++i) {
            const auto j = i + static_cast<std::size_t>(rng::uniform_index(engine, features.size() - i));
            std::swap(features[i], features[j]);
        }
        const auto split = best_split(data, pending.samples, std::span(features).first(mtry));
        if (!split) {
            continue;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto s : pending.samples) {
            (data.at(s, split->feature) != 0 ? right : left).push_back(s);
        }
        const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[pending.index];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.impurity_decrease = split->gain;
        node.left = left_index;
        node.right = left_index + 1;
        // right pushed first so the left subtree is expanded first
        stack.push_back({static_cast<std::size_t>(left_index + 1), pending.depth + 1, std::move(right)});
        stack.push_back({static_cast<std::size_t>(left_index), pending.depth + 1, std::move(left)});
    }
    return tree;
}

} // namespace detail

/// Per-item sum over trees of p(n) * dI(n), divided by the tree count (not normalized).
inline std::vector<double> raw_mdi(const std::vector<Tree>& trees, std::size_t item_count) {
    std::vector<double> importance(item_count, 0.0);
    for (const auto& tree : trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                importance[static_cast<std::size_t>(node.feature)] += node.samples_fraction * node.impurity_decrease;
            }
        }
    }
    if (!trees.empty()) {
        for (auto& v : importance) {
            v /= static_cast<double>(trees.size());
        }
    }
    return importance;
}

/// Mean decrease in impurity, normalized to sum to one (all zero if no tree split).
inline std::vector<double> mdi_importance(const ForestModel& model) {
    auto importance = raw_mdi(model.trees, model.item_count);
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total > 0.0) {
        for (auto& v : importance) {
            v /= total;
        }
    }
    return importance;
}

/**
 * Fits a forest. Tree t draws its bootstrap and feature candidates from its
 * own engine seeded with derive_seed(seed, tree-stream, t), so the model is
 * identical for any worker count.
 */
inline ForestModel rf_fit(const Dataset& data, const Hyperparams& hyperparams, std::uint64_t seed,
                          std::size_t workers = 1) {
    if (data.rows == 0 || data.cols == 0) {
        throw Error(ErrorKind::InsufficientData, "random forest needs a non-empty training set");
    }
    if (hyperparams.n_estimators == 0) {
        throw Error(ErrorKind::Config, "n_estimators must be positive");
    }
    if (data.rows < hyperparams.min_samples_split) {
        throw Error(ErrorKind::InsufficientData, "fewer training rows than min_samples_split");
    }
    ForestModel model;
    model.hyperparams = hyperparams;
    model.hyperparams.mtry = hyperparams.resolved_mtry(data.cols);
    model.seed = seed;
    model.item_count = data.cols;
    model.class_prior = data.class_counts();
    model.trees.resize(hyperparams.n_estimators);
    model.per_tree_seed.resize(hyperparams.n_estimators);
    for (std::size_t t = 0; t < hyperparams.n_estimators; ++t) {
        model.per_tree_seed[t] = rng::derive_seed(seed, rng::stream::kTree, t);
    }

    parallel_for(hyperparams.n_estimators, workers, [&](std::size_t t) {
        auto engine = rng::make_engine(model.per_tree_seed[t]);
        std::vector<std::size_t> samples(data.rows);
        if (model.hyperparams.bootstrap) {
            for (auto& s : samples) {
                s = static_cast<std::size_t>(rng::uniform_index(engine, data.rows));
            }
        } else {
            std::iota(samples.begin(), samples.end(), std::size_t{0});
        }
        model.trees[t] = detail::grow_tree(data, std::move(samples), model.hyperparams, *model.hyperparams.mtry,
                                           model.class_prior, engine);
    });
    model.mdi_importance = mdi_importance(model);
    return model;
}

inline ForestModel rf_fit(const ResponseMatrix& matrix, const Hyperparams& hyperparams, std::uint64_t seed,
                          std::size_t workers = 1) {
    if (!matrix.has_labels()) {
        throw Error(ErrorKind::Validation, "random forest training requires labelled data");
    }
    return rf_fit(Dataset::from(matrix), hyperparams, seed, workers);
}

struct Prediction {
    PlacementLabel label = PlacementLabel::CollegeAlgebra;
    LabelCounts votes{};
};

/// Majority vote; ties resolved by the training-class prior, then the lower rank.
inline Prediction rf_predict(const ForestModel& model, std::span<const std::uint8_t> row) {
    if (row.size() != model.item_count) {
        throw Error(ErrorKind::Validation, "row has " + std::to_string(row.size()) + " items, model expects " +
                                               std::to_string(model.item_count));
    }
    Prediction p;
    for (const auto& tree : model.trees) {
        ++p.votes[rank(tree.predict(row))];
    }
    p.label = resolve_majority(p.votes, model.class_prior);
    return p;
}

inline std::vector<PlacementLabel> rf_predict_all(const ForestModel& model, const Dataset& data) {
    std::vector<PlacementLabel> out;
    out.reserve(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) {
        out.push_back(rf_predict(model, data.row(r)).label);
    }
    return out;
}

/// The institutional cut-score rule applied to a row's percent score.
inline PlacementLabel rule_baseline(std::span<const std::uint8_t> row) { return placement(total_score(row).percent); }

inline PlacementLabel rule_baseline(const StudentRecord& row) { return rule_baseline(row.responses); }

struct EvalMetrics {
    double accuracy = 0.0;
    double precision_weighted = 0.0;
    double recall_weighted = 0.0;
    double f1_weighted = 0.0;
    /// confusion[truth][predicted]
    std::array<std::array<std::size_t, kLabelCount>, kLabelCount> confusion{};
    /// A class with support but no predictions scored precision 0.
    bool precision_ill_defined = false;
};

/// Support-weighted one-vs-rest precision, recall and F1.
inline EvalMetrics evaluate(std::span<const PlacementLabel> predictions, std::span<const PlacementLabel> truth) {
    if (predictions.size() != truth.size()) {
        throw Error(ErrorKind::Validation, "evaluate: predictions and truth differ in length");
    }
    if (truth.empty()) {
        throw Error(ErrorKind::InsufficientData, "evaluate: no observations");
    }
    EvalMetrics m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++m.confusion[rank(truth[i])][rank(predictions[i])];
    }
    const double total = static_cast<double>(truth.size());
    std::size_t correct = 0;
    for (std::size_t k = 0; k < kLabelCount; ++k) {
        correct += m.confusion[k][k];
    }
    m.accuracy = static_cast<double>(correct) / total;

    for (std::size_t k = 0; k < kLabelCount; ++k) {
        std::size_t support = 0;
        std::size_t predicted = 0;
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            support += m.confusion[k][j];
            predicted += m.confusion[j][k];
        }
        if (support == 0) {
            continue;
        }
        const double tp = static_cast<double>(m.confusion[k][k]);
        const double weight = static_cast<double>(support) / total;
        double precision = 0.0;
        if (predicted > 0) {
            precision = tp / static_cast<double>(predicted);
        } else {
            m.precision_ill_defined = true;
        }
        const double recall = tp / static_cast<double>(support);
        const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        m.precision_weighted += weight * precision;
        m.recall_weighted += weight * recall;
        m.f1_weighted += weight * f1;
    }
    return m;
}

struct PermutationImportance {
    double mean_drop = 0.0;
    double sd = 0.0;
};

inline constexpr std::size_t kDefaultPermutationRepeats = 10;

namespace detail {

inline double accuracy_of(const ForestModel& model, const Dataset& data) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.rows; ++r) {
        hits += rank(rf_predict(model, data.row(r)).label) == data.y[r] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows);
}

inline PermutationImportance permuted_drop(const ForestModel& model, const Dataset& data,
                                           std::span<const std::size_t> features, double baseline,
                                           std::uint64_t task_seed, std::size_t repeats) {
    std::vector<double> drops;
    drops.reserve(repeats);
    Dataset shuffled = data;
    std::vector<std::size_t> order(data.rows);
    for (std::size_t r = 0; r < repeats; ++r) {
        auto engine = rng::make_engine(rng::derive_seed(task_seed, 0, r));
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng::shuffle(std::span(order), engine);
        for (std::size_t i = 0; i < data.rows; ++i) {
            for (auto f : features) {
                shuffled.x[i * data.cols + f] = data.at(order[i], f);
            }
        }
        drops.push_back(baseline - accuracy_of(model, shuffled));
    }
    return {stats::mean(drops), stats::sample_sd(drops)};
}

} // namespace detail

/**
 * Accuracy drop when one column is shuffled, averaged over `repeats`.
 * Each (feature, repeat) permutation has its own derived seed.
 */
inline std::vector<PermutationImportance> permutation_importance(const ForestModel& model, const Dataset& data,
                                                                 std::uint64_t seed,
                                                                 std::size_t repeats = kDefaultPermutationRepeats,
                                                                 std::size_t workers = 1) {
    if (repeats == 0) {
        throw Error(ErrorKind::Config, "permutation importance needs at least one repeat");
    }
    if (data.cols != model.item_count) {
        throw Error(ErrorKind::Validation, "evaluation data width does not match the model");
    }
    const double baseline = detail::accuracy_of(model, data);
    std::vector<PermutationImportance> out(data.cols);
    parallel_for(data.cols, workers, [&](std::size_t f) {
        const std::size_t features[] = {f};
        out[f] = detail::permuted_drop(model, data, features, baseline,
                                       rng::derive_seed(seed, rng::stream::kPermutation, f), repeats);
    });
    return out;
}

/// Drop when several columns are shuffled together with one shared row permutation.
inline PermutationImportance permutation_importance_group(const ForestModel& model, const Dataset& data,
                                                          std::span<const std::size_t> features, std::uint64_t seed,
                                                          std::size_t repeats = kDefaultPermutationRepeats) {
    if (repeats == 0) {
        throw Error(ErrorKind::Config, "permutation importance needs at least one repeat");
    }
    const double baseline = detail::accuracy_of(model, data);
    std::uint64_t task_seed = rng::derive_seed(seed, rng::stream::kPermutation, ~std::uint64_t{0});
    for (auto f : features) {
        task_seed = rng::derive_seed(task_seed, f);
    }
    return detail::permuted_drop(model, data, features, baseline, task_seed, repeats);
}

/**
 * Stratified fold assignment. Indices of each class (in rank order) are
 * shuffled, then dealt round-robin with one counter running across all
 * classes, so fold sizes and per-class fold counts each differ by at most one.
 */
inline std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const PlacementLabel> labels, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) {
        throw Error(ErrorKind::Config, "k-fold needs k >= 2");
    }
    std::array<std::vector<std::size_t>, kLabelCount> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[rank(labels[i])].push_back(i);
    }
    for (std::size_t c = 0; c < kLabelCount; ++c) {
        if (!by_class[c].empty() && by_class[c].size() < k) {
            throw Error(ErrorKind::Stratification, "class " + std::string(to_string(label_from_rank(c))) + " has " +
                                                       std::to_string(by_class[c].size()) + " members, fewer than " +
                                                       std::to_string(k) + " folds");
        }
    }
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t counter = 0;
    for (std::size_t c = 0; c < kLabelCount; ++c) {
        auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kFolds, c));
        rng::shuffle(std::span(by_class[c]), engine);
        for (auto i : by_class[c]) {
            folds[counter++ % k].push_back(i);
        }
    }
    for (auto& fold : folds) {
        std::sort(fold.begin(), fold.end());
    }
    return folds;
}

struct CvResult {
    std::vector<double> fold_accuracy;
    double mean = 0.0;
    double sd = 0.0;
    std::array<double, 2> ci95{};  ///< mean -/+ 1.96 sd, unclamped
    EvalMetrics pooled;            ///< over all held-out predictions
};

/**
 * k-fold cross-validation with a caller-supplied learner:
 * `train(const Dataset&)` returns a callable mapping a row span to a label.
 */
template <typename Train>
CvResult cross_validate_with(const Dataset& data, std::size_t k, std::uint64_t seed, Train&& train) {
    std::vector<PlacementLabel> labels;
    labels.reserve(data.rows);
    for (auto y : data.y) {
        labels.push_back(label_from_rank(y));
    }
    const auto folds = stratified_kfold(labels, k, seed);

    CvResult result;
    std::vector<PlacementLabel> pooled_pred(data.rows);
    std::vector<bool> in_test(data.rows);
    for (std::size_t f = 0; f < k; ++f) {
        std::fill(in_test.begin(), in_test.end(), false);
        for (auto i : folds[f]) {
            in_test[i] = true;
        }
        Dataset train_set;
        train_set.cols = data.cols;
        for (std::size_t r = 0; r < data.rows; ++r) {
            if (!in_test[r]) {
                const auto row = data.row(r);
                train_set.x.insert(train_set.x.end(), row.begin(), row.end());
                train_set.y.push_back(data.y[r]);
                ++train_set.rows;
            }
        }
        const auto predictor = train(train_set, f);
        std::size_t hits = 0;
        for (auto i : folds[f]) {
            pooled_pred[i] = predictor(data.row(i));
            hits += rank(pooled_pred[i]) == data.y[i] ? 1 : 0;
        }
        result.fold_accuracy.push_back(static_cast<double>(hits) / static_cast<double>(folds[f].size()));
    }
    result.mean = stats::mean(result.fold_accuracy);
    result.sd = stats::sample_sd(result.fold_accuracy);
    result.ci95 = {result.mean - 1.96 * result.sd, result.mean + 1.96 * result.sd};
    result.pooled = evaluate(pooled_pred, labels);
    return result;
}

/// Random-forest cross-validation; fold f trains with seed derive_seed(seed, tree-stream, f).
inline CvResult cross_validate(const Dataset& data, const Hyperparams& hyperparams, std::size_t k, std::uint64_t seed,
                               std::size_t workers = 1) {
    return cross_validate_with(data, k, seed, [&](const Dataset& train, std::size_t fold) {
        auto model = std::make_shared<ForestModel>(
            rf_fit(train, hyperparams, rng::derive_seed(seed, rng::stream::kFolds, 1000 + fold), workers));
        return [model](std::span<const std::uint8_t> row) { return rf_predict(*model, row).label; };
    });
}

inline CvResult cross_validate_baseline(const Dataset& data, std::size_t k, std::uint64_t seed) {
    return cross_validate_with(data, k, seed, [](const Dataset&, std::size_t) {
        return [](std::span<const std::uint8_t> row) { return rule_baseline(row); };
    });
}

} // namespace placemetrics::forest

#endif
