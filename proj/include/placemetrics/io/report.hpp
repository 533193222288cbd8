#ifndef PLACEMETRICS_IO_REPORT_HPP
#define PLACEMETRICS_IO_REPORT_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "../cluster.hpp"
#include "../core.hpp"
#include "../ctt.hpp"
#include "../error.hpp"
#include "../featstats.hpp"
#include "../forest.hpp"
#include "serialize.hpp"

/**
 * @file report.hpp
 *
 * The analysis pipeline behind the CLI: each stage computes its results once
 * and renders a JSON section; `build_report` stitches every stage together.
 * Output depends only on the input bytes and the RunConfig.
 */

namespace placemetrics::io {

inline constexpr const char* kToolkitName = "placemetrics";
inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::size_t> item_count;
    forest::Hyperparams rf;
    std::size_t folds = 5;
    std::size_t k_min = 2;
    std::size_t k_max = 6;
    std::size_t bootstrap_iters = cluster::kDefaultBootstrapIterations;
    std::size_t permutation_repeats = forest::kDefaultPermutationRepeats;
    std::size_t gap_references = cluster::kDefaultGapReferences;
    std::size_t workers = 1;
    bool emit_plots = false;

    void validate() const {
        if (folds < 2) {
            throw Error(ErrorKind::Config, "--folds must be at least 2");
        }
        if (k_min < 1 || k_min > k_max) {
            throw Error(ErrorKind::Config, "k range must satisfy 1 <= k-min <= k-max");
        }
        if (bootstrap_iters < 1) {
            throw Error(ErrorKind::Config, "--bootstrap-iters must be at least 1");
        }
        if (rf.n_estimators < 1 || rf.max_depth < 1 || rf.min_samples_split < 2) {
            throw Error(ErrorKind::Config, "forest needs trees >= 1, max-depth >= 1, min-split >= 2");
        }
        if (rf.mtry && *rf.mtry < 1) {
            throw Error(ErrorKind::Config, "--mtry must be at least 1");
        }
        if (workers < 1) {
            throw Error(ErrorKind::Config, "--workers must be at least 1");
        }
    }
};

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Io, "SHA-256 digest failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline Json provenance_json(std::uint64_t seed, const std::string& input_bytes, const std::string& input_name) {
    return Json{{"toolkit", kToolkitName},
                {"version", kToolkitVersion},
                {"seed", seed},
                {"input", input_name},
                {"input_digest", "sha256:" + sha256_hex(input_bytes)}};
}

inline Json config_json(const RunConfig& c) {
    return Json{{"folds", c.folds},
                {"k_min", c.k_min},
                {"k_max", c.k_max},
                {"bootstrap_iters", c.bootstrap_iters},
                {"permutation_repeats", c.permutation_repeats},
                {"gap_references", c.gap_references},
                {"forest", to_json(c.rf)}};
}

// ---------------------------------------------------------------- descriptive

inline Json describe_section(const ResponseMatrix& matrix) {
    const auto pct = percent_scores(matrix);
    LabelCounts by_rule{};
    for (double p : pct) {
        ++by_rule[rank(placement(p))];
    }
    Json placement_json = Json::object();
    for (auto label : kAllLabels) {
        const double share = pct.empty() ? 0.0 : 100.0 * static_cast<double>(by_rule[rank(label)]) /
                                                     static_cast<double>(pct.size());
        placement_json[std::string(to_string(label))] = Json{{"count", by_rule[rank(label)]}, {"percent", number(share)}};
    }
    Json out{{"students", matrix.student_count()},
             {"items", matrix.item_count()},
             {"summary", to_json(describe(pct))},
             {"placement_by_cut_score", placement_json}};
    if (matrix.has_labels()) {
        out["label_counts"] = label_counts_json(matrix.label_counts());
    } else {
        out["label_counts"] = nullptr;
    }
    return out;
}

// ---------------------------------------------------------------- item analysis

struct ItemAnalysis {
    std::vector<ctt::ItemCtt> ctt;
    std::vector<featstats::FeatureScore> features;  ///< empty for unlabelled data
};

inline ItemAnalysis analyze(const ResponseMatrix& matrix) {
    ItemAnalysis a;
    a.ctt = ctt::analyze_items(matrix);
    if (matrix.has_labels()) {
        a.features = featstats::score_items(matrix);
    }
    return a;
}

inline Json ctt_section(const ItemAnalysis& a) {
    Json items = Json::array();
    for (const auto& item : a.ctt) {
        items.push_back(to_json(item));
    }
    return Json{{"items", items},
                {"group_fraction", 0.27},
                {"quality_distribution", to_json(ctt::quality_distribution(a.ctt))}};
}

inline Json features_section(const ItemAnalysis& a) {
    Json items = Json::array();
    for (std::size_t j = 0; j < a.features.size(); ++j) {
        const auto& f = a.features[j];
        items.push_back(Json{{"item", item_name(j)},
                             {"index", j},
                             {"difficulty", number(a.ctt[j].difficulty)},
                             {"anova", to_json(f.f)},
                             {"mutual_info_nats", number(f.mutual_info_nats)},
                             {"mutual_info_bits", number(featstats::nats_to_bits(f.mutual_info_nats))}});
    }
    return Json{{"items", items}};
}

// ---------------------------------------------------------------- supervised

struct MlAnalysis {
    forest::ForestModel model;
    forest::EvalMetrics training;
    forest::CvResult forest_cv;
    forest::CvResult baseline_cv;
    std::vector<forest::PermutationImportance> permutation;
};

inline forest::ForestModel train_model(const ResponseMatrix& matrix, const RunConfig& config) {
    return forest::rf_fit(matrix, config.rf, config.seed, config.workers);
}

inline forest::EvalMetrics training_metrics(const forest::ForestModel& model, const forest::Dataset& data) {
    const auto predicted = forest::rf_predict_all(model, data);
    std::vector<PlacementLabel> truth;
    for (auto y : data.y) {
        truth.push_back(label_from_rank(y));
    }
    return forest::evaluate(predicted, truth);
}

inline Json train_section(const forest::ForestModel& model, const forest::EvalMetrics& training) {
    Json mdi = Json::array();
    for (std::size_t j = 0; j < model.mdi_importance.size(); ++j) {
        mdi.push_back(Json{{"item", item_name(j)}, {"mdi", number(model.mdi_importance[j])}});
    }
    std::size_t nodes = 0;
    std::size_t deepest = 0;
    for (const auto& tree : model.trees) {
        nodes += tree.nodes.size();
        deepest = std::max(deepest, tree.depth());
    }
    return Json{{"hyperparams", to_json(model.hyperparams)},
                {"training_metrics", to_json(training)},
                {"mdi_importance", mdi},
                {"total_nodes", nodes},
                {"max_tree_depth", deepest}};
}

inline Json cv_section(const forest::CvResult& forest_cv, const forest::CvResult& baseline_cv, std::size_t folds) {
    return Json{{"folds", folds}, {"random_forest", to_json(forest_cv)}, {"rule_baseline", to_json(baseline_cv)}};
}

inline featstats::AgreementTable agreement(const ItemAnalysis& a, const forest::ForestModel& model) {
    std::vector<featstats::MetricColumn> metrics{{"D", {}}, {"r_pbis", {}}, {"F", {}}, {"MI", {}}, {"rf_importance", {}}};
    for (std::size_t j = 0; j < a.ctt.size(); ++j) {
        metrics[0].values.push_back(a.ctt[j].discrimination);
        metrics[1].values.push_back(a.ctt[j].point_biserial);
        const double f = a.features[j].f.f_stat;
        metrics[2].values.push_back(std::isfinite(f) ? std::optional<double>(f) : std::nullopt);
        metrics[3].values.push_back(a.features[j].mutual_info_nats);
        metrics[4].values.push_back(model.mdi_importance[j]);
    }
    return featstats::method_agreement(metrics);
}

inline Json importance_section(const ItemAnalysis& a, const forest::ForestModel& model,
                               const std::vector<forest::PermutationImportance>& permutation) {
    Json items = Json::array();
    std::vector<std::size_t> order(model.mdi_importance.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        order[j] = j;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return model.mdi_importance[x] > model.mdi_importance[y];
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t j = order[r];
        items.push_back(Json{{"rank", r + 1},
                             {"item", item_name(j)},
                             {"index", j},
                             {"mdi", number(model.mdi_importance[j])},
                             {"permutation_mean_drop", number(permutation[j].mean_drop)},
                             {"permutation_sd", number(permutation[j].sd)},
                             {"f_stat", number(a.features[j].f.f_stat)},
                             {"mutual_info_nats", number(a.features[j].mutual_info_nats)},
                             {"discrimination", number(a.ctt[j].discrimination)},
                             {"point_biserial", number(a.ctt[j].point_biserial)}});
    }
    Json out{{"items", items}};
    try {
        out["method_agreement"] = to_json(agreement(a, model));
    } catch (const Error& e) {
        out["method_agreement"] = nullptr;
    }
    return out;
}

// ---------------------------------------------------------------- clustering

struct ClusterAnalysis {
    cluster::PointSet points;
    cluster::WcssCurve curve;
    std::vector<std::optional<double>> silhouette;  ///< per k; absent for k = 1
    std::vector<std::optional<cluster::GapResult>> gap;
    std::size_t chosen_k = 0;
    cluster::ClusterProfile profile;
};

inline ClusterAnalysis analyze_clusters(const ResponseMatrix& matrix, const RunConfig& config, bool with_gap = true) {
    ClusterAnalysis c;
    c.points = cluster::build_features(matrix);
    c.curve = cluster::wcss_curve(c.points, config.k_min, config.k_max, config.seed);
    std::optional<double> best;
    for (std::size_t i = 0; i < c.curve.ks.size(); ++i) {
        const std::size_t k = c.curve.ks[i];
        auto& solution = c.curve.solutions[i];
        if (k >= 2) {
            solution.silhouette_mean = cluster::silhouette(c.points, solution.assignments).mean;
        }
        c.silhouette.push_back(solution.silhouette_mean);
        if (with_gap && solution.wcss > 0.0) {
            c.gap.push_back(cluster::gap_statistic(c.points, k, config.seed, config.gap_references, {}, solution.wcss));
        } else {
            c.gap.push_back(std::nullopt);
        }
        if (solution.silhouette_mean && (!best || *solution.silhouette_mean > *best)) {
            best = solution.silhouette_mean;
            c.chosen_k = k;
        }
    }
    if (c.chosen_k == 0) {
        c.chosen_k = c.curve.ks.front();
    }
    c.profile = cluster::cluster_profile(c.curve.solutions[c.chosen_k - config.k_min], matrix);
    return c;
}

inline Json cluster_section(const ClusterAnalysis& c) {
    Json per_k = Json::array();
    for (std::size_t i = 0; i < c.curve.ks.size(); ++i) {
        const auto& s = c.curve.solutions[i];
        per_k.push_back(Json{{"k", c.curve.ks[i]},
                             {"wcss", number(s.wcss)},
                             {"silhouette", number(c.silhouette[i])},
                             {"gap", c.gap[i] ? to_json(*c.gap[i]) : Json(nullptr)},
                             {"iterations", s.iterations},
                             {"converged", s.converged}});
    }
    return Json{{"per_k", per_k},
                {"elbow_k", c.curve.elbow ? Json(*c.curve.elbow) : Json(nullptr)},
                {"chosen_k", c.chosen_k},
                {"chosen_by", "max_silhouette"},
                {"profile", to_json(c.profile)}};
}

inline Json stability_section(const ClusterAnalysis& c, const RunConfig& config) {
    Json per_k = Json::array();
    for (std::size_t i = 0; i < c.curve.ks.size(); ++i) {
        const auto report = cluster::bootstrap_stability(c.points, c.curve.solutions[i], config.bootstrap_iters,
                                                         config.seed, {}, config.workers);
        Json entry = to_json(report);
        entry["k"] = c.curve.ks[i];
        per_k.push_back(entry);
    }
    return Json{{"iterations", config.bootstrap_iters}, {"per_k", per_k}};
}

// ---------------------------------------------------------------- plots

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    out << text;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_score_histogram(const std::filesystem::path& dir, const ResponseMatrix& matrix) {
    const auto pct = percent_scores(matrix);
    constexpr double width = 5.0;
    std::array<std::size_t, 20> bins{};
    for (double p : pct) {
        bins[std::min<std::size_t>(static_cast<std::size_t>(p / width), bins.size() - 1)] += 1;
    }
    std::string text = "bin_start\tbin_end\tcount\n";
    for (std::size_t b = 0; b < bins.size(); ++b) {
        text += fmt(static_cast<double>(b) * width) + '\t' + fmt(static_cast<double>(b + 1) * width) + '\t' +
                std::to_string(bins[b]) + '\n';
    }
    write_text(dir / "score_histogram.tsv", text);
}

inline void write_difficulty_discrimination(const std::filesystem::path& dir, const ItemAnalysis& a) {
    std::string text = "item\tp\tD\tquality\n";
    for (const auto& item : a.ctt) {
        text += item_name(item.item_index) + '\t' + fmt(item.difficulty) + '\t' + fmt(item.discrimination) + '\t' +
                std::string(ctt::to_string(item.quality)) + '\n';
    }
    write_text(dir / "difficulty_discrimination.tsv", text);
}

inline void write_feature_importance(const std::filesystem::path& dir, const ItemAnalysis& a,
                                     const forest::ForestModel& model,
                                     const std::vector<forest::PermutationImportance>& permutation) {
    std::string text = "item\tmdi\tpermutation\tf_stat\tmutual_info\n";
    for (std::size_t j = 0; j < model.mdi_importance.size(); ++j) {
        const double f = a.features[j].f.f_stat;
        text += item_name(j) + '\t' + fmt(model.mdi_importance[j]) + '\t' + fmt(permutation[j].mean_drop) + '\t' +
                (std::isinf(f) ? std::string("inf") : fmt(f)) + '\t' + fmt(a.features[j].mutual_info_nats) + '\n';
    }
    write_text(dir / "feature_importance.tsv", text);
}

inline void write_cluster_plots(const std::filesystem::path& dir, const ResponseMatrix& matrix,
                                const ClusterAnalysis& c) {
    const auto& solution = c.curve.solutions[c.chosen_k - c.curve.ks.front()];
    std::vector<std::size_t> rank_of(c.chosen_k, 0);
    for (std::size_t r = 0; r < c.profile.clusters.size(); ++r) {
        rank_of[c.profile.clusters[r].cluster_id] = r;
    }
    std::string text = "student_id\tpercent\tcluster\tcategory\n";
    for (std::size_t i = 0; i < matrix.student_count(); ++i) {
        const auto& s = matrix.student(i);
        text += s.id + '\t' + fmt(total_score(s).percent) + '\t' + std::to_string(rank_of[solution.assignments[i]]) +
                '\t' + (s.label ? std::string(to_string(*s.label)) : std::string()) + '\n';
    }
    write_text(dir / "cluster_scores.tsv", text);

    std::string curve = "k\twcss\tsilhouette\tgap\n";
    for (std::size_t i = 0; i < c.curve.ks.size(); ++i) {
        curve += std::to_string(c.curve.ks[i]) + '\t' + fmt(c.curve.wcss[i]) + '\t' +
                 (c.silhouette[i] ? fmt(*c.silhouette[i]) : std::string()) + '\t' +
                 (c.gap[i] ? fmt(c.gap[i]->gap) : std::string()) + '\n';
    }
    write_text(dir / "cluster_validation.tsv", curve);
}

// ---------------------------------------------------------------- full report

struct FullReport {
    Json json;
    ItemAnalysis items;
    MlAnalysis ml;
    ClusterAnalysis clusters;
};

inline FullReport build_report(const ResponseMatrix& matrix, const RunConfig& config, const Json& provenance) {
    matrix.require_labels();
    FullReport r;
    r.items = analyze(matrix);
    const auto data = forest::Dataset::from(matrix);
    r.ml.model = train_model(matrix, config);
    r.ml.training = training_metrics(r.ml.model, data);
    r.ml.forest_cv = forest::cross_validate(data, config.rf, config.folds, config.seed, config.workers);
    r.ml.baseline_cv = forest::cross_validate_baseline(data, config.folds, config.seed);
    r.ml.permutation =
        forest::permutation_importance(r.ml.model, data, config.seed, config.permutation_repeats, config.workers);
    r.clusters = analyze_clusters(matrix, config);

    Json items = ctt_section(r.items);
    items["features"] = features_section(r.items)["items"];
    r.json = Json{{"provenance", provenance},
                  {"config", config_json(config)},
                  {"descriptive", describe_section(matrix)},
                  {"items", items},
                  {"ml",
                   Json{{"train", train_section(r.ml.model, r.ml.training)},
                        {"cv", cv_section(r.ml.forest_cv, r.ml.baseline_cv, config.folds)},
                        {"importance", importance_section(r.items, r.ml.model, r.ml.permutation)}}},
                  {"clustering", Json{{"validation", cluster_section(r.clusters)},
                                      {"stability", stability_section(r.clusters, config)}}}};
    return r;
}

inline void write_report_plots(const std::filesystem::path& dir, const ResponseMatrix& matrix, const FullReport& r) {
    write_score_histogram(dir, matrix);
    write_difficulty_discrimination(dir, r.items);
    write_feature_importance(dir, r.items, r.ml.model, r.ml.permutation);
    write_cluster_plots(dir, matrix, r.clusters);
}

inline void write_json(const std::filesystem::path& path, const Json& json) { write_text(path, json.dump(2) + "\n"); }

} // namespace placemetrics::io

#endif
