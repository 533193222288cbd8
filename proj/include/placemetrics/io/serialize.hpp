#ifndef PLACEMETRICS_IO_SERIALIZE_HPP
#define PLACEMETRICS_IO_SERIALIZE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "../cluster.hpp"
#include "../core.hpp"
#include "../ctt.hpp"
#include "../error.hpp"
#include "../featstats.hpp"
#include "../forest.hpp"
#include "../synth.hpp"

/**
 * @file serialize.hpp
 *
 * JSON encodings. Objects are key-sorted (nlohmann's default map), doubles
 * print with at most 17 significant digits, infinities become the strings
 * "inf" / "-inf" and absent values become null.
 */

namespace placemetrics::io {

using Json = nlohmann::json;

inline Json number(double value) {
    if (std::isnan(value)) {
        return nullptr;
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    return value;
}

inline Json number(const std::optional<double>& value) { return value ? number(*value) : Json(nullptr); }

inline std::string item_name(std::size_t index) { return "Q" + std::to_string(index + 1); }

inline Json label_counts_json(const LabelCounts& counts) {
    Json j = Json::object();
    for (auto label : kAllLabels) {
        j[std::string(to_string(label))] = counts[rank(label)];
    }
    return j;
}

inline Json to_json(const ScoreSummary& s) {
    return Json{{"n", s.n},           {"mean", number(s.mean)},   {"median", number(s.median)},
                {"sd", number(s.sd)}, {"variance", number(s.variance)}, {"min", number(s.min)},
                {"max", number(s.max)}, {"range", number(s.range)}, {"q1", number(s.q1)},
                {"q3", number(s.q3)}, {"iqr", number(s.iqr)},     {"skewness", number(s.skewness)},
                {"excess_kurtosis", number(s.excess_kurtosis)}};
}

inline Json to_json(const ctt::ItemCtt& item) {
    return Json{{"item", item_name(item.item_index)},
                {"index", item.item_index},
                {"difficulty", number(item.difficulty)},
                {"discrimination", number(item.discrimination)},
                {"upper_prop", number(item.upper_prop)},
                {"lower_prop", number(item.lower_prop)},
                {"point_biserial", number(item.point_biserial)},
                {"quality", std::string(ctt::to_string(item.quality))}};
}

inline Json to_json(const ctt::QualityDistribution& dist) {
    Json bands = Json::object();
    for (auto q : ctt::kAllQualities) {
        const auto b = static_cast<std::size_t>(q);
        bands[std::string(ctt::to_string(q))] = Json{{"count", dist.counts[b]}, {"percent", number(dist.percent[b])}};
    }
    return Json{{"bands", bands}, {"total", dist.total}};
}

inline Json to_json(const featstats::AnovaResult& r) {
    return Json{{"f_stat", number(r.f_stat)},         {"df_between", r.df_between},
                {"df_within", r.df_within},           {"ss_between", number(r.ss_between)},
                {"ss_within", number(r.ss_within)},   {"ms_between", number(r.ms_between)},
                {"ms_within", number(r.ms_within)},   {"log10_p", number(r.log10_p)}};
}

inline Json to_json(const featstats::AgreementTable& table) {
    Json matrix = Json::object();
    for (std::size_t a = 0; a < table.names.size(); ++a) {
        Json row = Json::object();
        for (std::size_t b = 0; b < table.names.size(); ++b) {
            row[table.names[b]] = number(table.correlation[a][b]);
        }
        matrix[table.names[a]] = row;
    }
    return Json{{"metrics", table.names}, {"correlation", matrix}, {"complete_items", table.complete_items}};
}

inline Json to_json(const forest::EvalMetrics& m) {
    Json confusion = Json::array();
    for (const auto& row : m.confusion) {
        confusion.push_back(row);
    }
    return Json{{"accuracy", number(m.accuracy)},
                {"precision_weighted", number(m.precision_weighted)},
                {"recall_weighted", number(m.recall_weighted)},
                {"f1_weighted", number(m.f1_weighted)},
                {"confusion", confusion},
                {"precision_ill_defined", m.precision_ill_defined}};
}

inline Json to_json(const forest::CvResult& cv) {
    Json folds = Json::array();
    for (double a : cv.fold_accuracy) {
        folds.push_back(number(a));
    }
    return Json{{"fold_accuracy", folds},
                {"mean", number(cv.mean)},
                {"sd", number(cv.sd)},
                {"ci95", Json::array({number(cv.ci95[0]), number(cv.ci95[1])})},
                {"pooled", to_json(cv.pooled)}};
}

inline Json to_json(const forest::Hyperparams& hp) {
    return Json{{"n_estimators", hp.n_estimators},
                {"max_depth", hp.max_depth},
                {"min_samples_split", hp.min_samples_split},
                {"mtry", hp.mtry ? Json(*hp.mtry) : Json(nullptr)},
                {"bootstrap", hp.bootstrap}};
}

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormat = "placemetrics-forest";

/// Versioned model dump; `model_from_json` restores an identical model.
inline Json to_json(const forest::ForestModel& model) {
    Json trees = Json::array();
    for (const auto& tree : model.trees) {
        Json nodes = Json::array();
        for (const auto& node : tree.nodes) {
            nodes.push_back(Json{{"feature", node.feature},
                                 {"left", node.left},
                                 {"right", node.right},
                                 {"class_counts", node.class_counts},
                                 {"prediction", std::string(to_string(node.prediction))},
                                 {"samples_fraction", number(node.samples_fraction)},
                                 {"impurity_decrease", number(node.impurity_decrease)}});
        }
        trees.push_back(Json{{"nodes", nodes}});
    }
    Json mdi = Json::array();
    for (double v : model.mdi_importance) {
        mdi.push_back(number(v));
    }
    return Json{{"format", kModelFormat},
                {"version", kModelFormatVersion},
                {"seed", model.seed},
                {"item_count", model.item_count},
                {"hyperparams", to_json(model.hyperparams)},
                {"class_prior", model.class_prior},
                {"per_tree_seed", model.per_tree_seed},
                {"mdi_importance", mdi},
                {"trees", trees}};
}

inline forest::ForestModel model_from_json(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw Error(ErrorKind::Validation, "not a placemetrics forest model");
        }
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw Error(ErrorKind::Validation, "unsupported model version " + j.at("version").dump());
        }
        forest::ForestModel model;
        model.seed = j.at("seed").get<std::uint64_t>();
        model.item_count = j.at("item_count").get<std::size_t>();
        const auto& hp = j.at("hyperparams");
        model.hyperparams.n_estimators = hp.at("n_estimators").get<std::size_t>();
        model.hyperparams.max_depth = hp.at("max_depth").get<std::size_t>();
        model.hyperparams.min_samples_split = hp.at("min_samples_split").get<std::size_t>();
        if (!hp.at("mtry").is_null()) {
            model.hyperparams.mtry = hp.at("mtry").get<std::size_t>();
        }
        model.hyperparams.bootstrap = hp.at("bootstrap").get<bool>();
        model.class_prior = j.at("class_prior").get<LabelCounts>();
        model.per_tree_seed = j.at("per_tree_seed").get<std::vector<std::uint64_t>>();
        model.mdi_importance = j.at("mdi_importance").get<std::vector<double>>();
        for (const auto& t : j.at("trees")) {
            forest::Tree tree;
            for (const auto& n : t.at("nodes")) {
                forest::TreeNode node;
                node.feature = n.at("feature").get<std::int32_t>();
                node.left = n.at("left").get<std::int32_t>();
                node.right = n.at("right").get<std::int32_t>();
                node.class_counts = n.at("class_counts").get<LabelCounts>();
                const auto label = parse_label(n.at("prediction").get<std::string>());
                if (!label) {
                    throw Error(ErrorKind::Validation, "model node has an unknown prediction label");
                }
                node.prediction = *label;
                node.samples_fraction = n.at("samples_fraction").get<double>();
                node.impurity_decrease = n.at("impurity_decrease").get<double>();
                tree.nodes.push_back(node);
            }
            const auto count = static_cast<std::int32_t>(tree.nodes.size());
            if (count == 0) {
                throw Error(ErrorKind::Validation, "model tree has no nodes");
            }
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf() && (node.feature >= static_cast<std::int32_t>(model.item_count) ||
                                        node.left <= 0 || node.left >= count || node.right <= 0 ||
                                        node.right >= count)) {
                    throw Error(ErrorKind::Validation, "model tree has an invalid split node");
                }
            }
            model.trees.push_back(std::move(tree));
        }
        if (model.trees.size() != model.hyperparams.n_estimators ||
            model.per_tree_seed.size() != model.trees.size() || model.mdi_importance.size() != model.item_count) {
            throw Error(ErrorKind::Validation, "model arrays disagree in length");
        }
        return model;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::Validation, std::string("malformed model JSON: ") + e.what());
    }
}

inline Json to_json(const cluster::GapResult& g) {
    return Json{{"gap", number(g.gap)}, {"se", number(g.se)}, {"log_wk", number(g.log_wk)}};
}

inline Json to_json(const cluster::StabilityReport& s) {
    Json per = Json::array();
    for (double v : s.per_iteration_ari) {
        per.push_back(number(v));
    }
    return Json{{"mean_ari", number(s.mean_ari)},
                {"ci95", Json::array({number(s.ci95[0]), number(s.ci95[1])})},
                {"per_iteration_ari", per}};
}

inline Json to_json(const cluster::ClusterProfile& profile) {
    Json clusters = Json::array();
    for (std::size_t i = 0; i < profile.clusters.size(); ++i) {
        const auto& c = profile.clusters[i];
        clusters.push_back(Json{{"rank", i},
                                {"cluster_id", c.cluster_id},
                                {"n", c.n},
                                {"mean_pct", number(c.mean_pct)},
                                {"sd_pct", number(c.sd_pct)},
                                {"min_pct", number(c.min_pct)},
                                {"max_pct", number(c.max_pct)},
                                {"label_counts", c.label_counts ? label_counts_json(*c.label_counts) : Json(nullptr)},
                                {"purity", number(c.purity)}});
    }
    return Json{{"clusters", clusters}, {"natural_boundary", number(profile.natural_boundary)}};
}

inline Json to_json(const synth::TwoPLItem& item) { return Json{{"a", number(item.a)}, {"b", number(item.b)}}; }

} // namespace placemetrics::io

#endif
