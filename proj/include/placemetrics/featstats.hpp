#ifndef PLACEMETRICS_FEATSTATS_HPP
#define PLACEMETRICS_FEATSTATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "special.hpp"
#include "stats.hpp"

/**
 * @file featstats.hpp
 *
 * Univariate item scoring against placement labels: one-way ANOVA F with its
 * upper-tail p-value, plug-in mutual information, and the cross-method
 * agreement table.
 */

namespace placemetrics::featstats {

struct AnovaResult {
    double f_stat = 0.0;  ///< +inf when all within-group variance vanishes
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    double ms_between = 0.0;
    double ms_within = 0.0;
    double log10_p = 0.0;  ///< -inf alongside an infinite F

    bool f_infinite() const noexcept { return std::isinf(f_stat); }
};

inline double f_survival(double f, std::size_t df1, std::size_t df2) {
    if (df1 < 1 || df2 < 1) {
        throw Error(ErrorKind::Domain, "F survival: degrees of freedom must be >= 1");
    }
    return special::f_log10_survival(f, static_cast<double>(df1), static_cast<double>(df2));
}

/**
 * One-way ANOVA of a binary item from per-group tallies.
 *
 * Within-group SS uses the binary identity n_k p_k (1 - p_k) = c_k (n_k - c_k) / n_k.
 * Empty groups are dropped before K is counted.
 */
inline AnovaResult anova_from_counts(std::span<const std::size_t> group_sizes,
                                     std::span<const std::size_t> group_correct) {
    if (group_sizes.size() != group_correct.size()) {
        throw Error(ErrorKind::Validation, "anova: group size / correct count length mismatch");
    }
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t groups = 0;
    for (std::size_t k = 0; k < group_sizes.size(); ++k) {
        if (group_correct[k] > group_sizes[k]) {
            throw Error(ErrorKind::Validation, "anova: correct count exceeds group size");
        }
        n += group_sizes[k];
        correct += group_correct[k];
        groups += group_sizes[k] > 0 ? 1 : 0;
    }
    if (groups < 2) {
        throw Error(ErrorKind::InsufficientData, "anova requires at least two non-empty groups");
    }
    if (n <= groups) {
        throw Error(ErrorKind::InsufficientData, "anova requires more observations than groups");
    }

    AnovaResult r;
    r.df_between = groups - 1;
    r.df_within = n - groups;
    const double grand = static_cast<double>(correct) / static_cast<double>(n);
    for (std::size_t k = 0; k < group_sizes.size(); ++k) {
        if (group_sizes[k] == 0) {
            continue;
        }
        const double nk = static_cast<double>(group_sizes[k]);
        const double ck = static_cast<double>(group_correct[k]);
        const double dev = ck / nk - grand;
        r.ss_between += nk * dev * dev;
        r.ss_within += ck * (nk - ck) / nk;
    }
    r.ms_between = r.ss_between / static_cast<double>(r.df_between);
    r.ms_within = r.ss_within / static_cast<double>(r.df_within);
    if (r.ms_within > 0.0) {
        r.f_stat = r.ms_between / r.ms_within;
        r.log10_p = f_survival(r.f_stat, r.df_between, r.df_within);
    } else if (r.ms_between > 0.0) {
        r.f_stat = std::numeric_limits<double>::infinity();
        r.log10_p = -std::numeric_limits<double>::infinity();
    } else {
        r.f_stat = 0.0;
        r.log10_p = 0.0;
    }
    return r;
}

struct ItemByLabel {
    LabelCounts sizes{};
    LabelCounts correct{};
};

inline ItemByLabel tabulate(const ResponseMatrix& matrix, std::size_t item) {
    matrix.check_item(item);
    matrix.require_labels();
    ItemByLabel t;
    for (std::size_t i = 0; i < matrix.student_count(); ++i) {
        const std::size_t k = rank(matrix.label(i));
        ++t.sizes[k];
        t.correct[k] += matrix.at(i, item);
    }
    return t;
}

inline AnovaResult anova_f(const ResponseMatrix& matrix, std::size_t item) {
    const auto t = tabulate(matrix, item);
    return anova_from_counts(t.sizes, t.correct);
}

/**
 * Plug-in mutual information (nats) between a binary item and the label,
 * sum over cells of (n_xy / n) log(n_xy n / (n_x n_y)), with 0 log 0 = 0.
 * Equals H(label) - sum_x P(x) H(label | x).
 */
inline double mutual_info_from_counts(std::span<const std::size_t> group_sizes,
                                      std::span<const std::size_t> group_correct) {
    if (group_sizes.size() != group_correct.size()) {
        throw Error(ErrorKind::Validation, "mutual info: length mismatch");
    }
    double n = 0.0;
    double n1 = 0.0;
    for (std::size_t k = 0; k < group_sizes.size(); ++k) {
        if (group_correct[k] > group_sizes[k]) {
            throw Error(ErrorKind::Validation, "mutual info: correct count exceeds group size");
        }
        n += static_cast<double>(group_sizes[k]);
        n1 += static_cast<double>(group_correct[k]);
    }
    if (n == 0.0) {
        return 0.0;
    }
    const double n0 = n - n1;
    double mi = 0.0;
    for (std::size_t k = 0; k < group_sizes.size(); ++k) {
        const double ny = static_cast<double>(group_sizes[k]);
        const double cells[2] = {ny - static_cast<double>(group_correct[k]), static_cast<double>(group_correct[k])};
        const double margins[2] = {n0, n1};
        for (int x = 0; x < 2; ++x) {
            if (cells[x] > 0.0) {
                mi += cells[x] / n * std::log(cells[x] * n / (margins[x] * ny));
            }
        }
    }
    return std::max(mi, 0.0);
}

inline double mutual_info(const ResponseMatrix& matrix, std::size_t item) {
    const auto t = tabulate(matrix, item);
    return mutual_info_from_counts(t.sizes, t.correct);
}

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

struct FeatureScore {
    AnovaResult f;
    double mutual_info_nats = 0.0;
};

inline std::vector<FeatureScore> score_items(const ResponseMatrix& matrix) {
    std::vector<FeatureScore> out;
    out.reserve(matrix.item_count());
    for (std::size_t j = 0; j < matrix.item_count(); ++j) {
        const auto t = tabulate(matrix, j);
        out.push_back({anova_from_counts(t.sizes, t.correct), mutual_info_from_counts(t.sizes, t.correct)});
    }
    return out;
}

/// Named per-item metric column; absent entries are excluded pairwise.
struct MetricColumn {
    std::string name;
    std::vector<std::optional<double>> values;
};

struct AgreementTable {
    std::vector<std::string> names;
    /// correlation[a][b]; absent when the pair has < 3 shared items or zero variance.
    std::vector<std::vector<std::optional<double>>> correlation;
    std::size_t complete_items = 0;

    std::optional<double> at(const std::string& a, const std::string& b) const {
        const auto ia = std::find(names.begin(), names.end(), a);
        const auto ib = std::find(names.begin(), names.end(), b);
        if (ia == names.end() || ib == names.end()) {
            throw Error(ErrorKind::Domain, "unknown metric name");
        }
        return correlation[static_cast<std::size_t>(ia - names.begin())][static_cast<std::size_t>(ib - names.begin())];
    }
};

inline AgreementTable method_agreement(std::span<const MetricColumn> metrics) {
    if (metrics.empty()) {
        throw Error(ErrorKind::InsufficientData, "method agreement needs at least one metric");
    }
    const std::size_t items = metrics.front().values.size();
    for (const auto& m : metrics) {
        if (m.values.size() != items) {
            throw Error(ErrorKind::Validation, "method agreement: metric columns differ in length");
        }
    }
    AgreementTable table;
    for (std::size_t i = 0; i < items; ++i) {
        const bool complete =
            std::all_of(metrics.begin(), metrics.end(), [&](const MetricColumn& m) { return m.values[i].has_value(); });
        table.complete_items += complete ? 1 : 0;
    }
    if (table.complete_items < 3) {
        throw Error(ErrorKind::InsufficientData, "method agreement needs at least 3 items with every metric defined");
    }

    const std::size_t k = metrics.size();
    table.correlation.assign(k, std::vector<std::optional<double>>(k));
    for (const auto& m : metrics) {
        table.names.push_back(m.name);
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            std::vector<double> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < items; ++i) {
                if (metrics[a].values[i] && metrics[b].values[i]) {
                    xs.push_back(*metrics[a].values[i]);
                    ys.push_back(*metrics[b].values[i]);
                }
            }
            std::optional<double> r;
            if (xs.size() >= 3) {
                r = stats::pearson(xs, ys);
                if (r && a == b) {
                    r = 1.0;
                }
            }
            table.correlation[a][b] = r;
            table.correlation[b][a] = r;
        }
    }
    return table;
}

} // namespace placemetrics::featstats

#endif
