#ifndef PLACEMETRICS_CTT_HPP
#define PLACEMETRICS_CTT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "stats.hpp"

/**
 * @file ctt.hpp
 *
 * Classical Test Theory item statistics: difficulty, upper-lower 27% group
 * discrimination, point-biserial correlation and Ebel quality bands.
 */

namespace placemetrics::ctt {

enum class Quality { Excellent, Good, Marginal, Poor };

inline constexpr std::array<Quality, 4> kAllQualities = {Quality::Excellent, Quality::Good, Quality::Marginal,
                                                         Quality::Poor};

constexpr std::string_view to_string(Quality q) noexcept {
    switch (q) {
    case Quality::Excellent: return "Excellent";
    case Quality::Good: return "Good";
    case Quality::Marginal: return "Marginal";
    case Quality::Poor: return "Poor";
    }
    return "Poor";
}

/// Ebel bands, lower edge inclusive: >= 0.40, [0.30, 0.40), [0.20, 0.30), < 0.20.
constexpr Quality classify_quality(double discrimination) noexcept {
    if (discrimination >= 0.40) {
        return Quality::Excellent;
    }
    if (discrimination >= 0.30) {
        return Quality::Good;
    }
    if (discrimination >= 0.20) {
        return Quality::Marginal;
    }
    return Quality::Poor;
}

struct ItemCtt {
    std::size_t item_index = 0;
    double difficulty = 0.0;
    double discrimination = 0.0;
    double upper_prop = 0.0;
    double lower_prop = 0.0;
    std::optional<double> point_biserial;
    Quality quality = Quality::Poor;
};

struct ExtremeGroups {
    std::vector<std::size_t> upper;
    std::vector<std::size_t> lower;
};

/// floor(0.27 n), in integer arithmetic.
constexpr std::size_t group_size(std::size_t n) noexcept { return (27 * n) / 100; }

inline constexpr std::size_t kMinStudentsForGroups = 8;

inline double difficulty(std::span<const double> column) {
    if (column.empty()) {
        throw Error(ErrorKind::Sizing, "difficulty requires at least one student");
    }
    return stats::mean(column);
}

inline double difficulty(const ResponseMatrix& matrix, std::size_t item) {
    matrix.check_item(item);
    return difficulty(matrix.column(item));
}

/**
 * Upper and lower 27% groups by total score.
 *
 * Ties at the cutoff are broken by student position: the upper group takes
 * (total descending, position ascending), the lower group (total ascending,
 * position ascending).
 */
inline ExtremeGroups extreme_groups(std::span<const double> totals) {
    const std::size_t n = totals.size();
    if (n < kMinStudentsForGroups) {
        throw Error(ErrorKind::Sizing, "extreme groups need at least " + std::to_string(kMinStudentsForGroups) +
                                           " students, got " + std::to_string(n));
    }
    const std::size_t size = group_size(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    ExtremeGroups groups;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
    groups.upper.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });
    groups.lower.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
    return groups;
}

inline ExtremeGroups extreme_groups(const ResponseMatrix& matrix) { return extreme_groups(raw_totals(matrix)); }

namespace detail {
inline double group_proportion(std::span<const double> column, std::span<const std::size_t> members) {
    double correct = 0.0;
    for (std::size_t i : members) {
        correct += column[i];
    }
    return correct / static_cast<double>(members.size());
}
} // namespace detail

struct Discrimination {
    double upper_prop = 0.0;
    double lower_prop = 0.0;
    double index = 0.0;
};

/// Discrimination of one item column given precomputed groups.
inline Discrimination discrimination(std::span<const double> column, const ExtremeGroups& groups) {
    Discrimination d;
    d.upper_prop = detail::group_proportion(column, groups.upper);
    d.lower_prop = detail::group_proportion(column, groups.lower);
    d.index = d.upper_prop - d.lower_prop;
    return d;
}

inline double discrimination(const ResponseMatrix& matrix, std::size_t item) {
    matrix.check_item(item);
    return discrimination(matrix.column(item), extreme_groups(matrix)).index;
}

/// Pearson correlation of a binary column with totals; absent when either is constant.
inline std::optional<double> point_biserial(std::span<const double> column, std::span<const double> totals) {
    return stats::pearson(column, totals);
}

struct PointBiserialOptions {
    /// Correlate against the total with the item itself removed.
    bool corrected = false;
};

inline std::optional<double> point_biserial(const ResponseMatrix& matrix, std::size_t item,
                                            PointBiserialOptions options = {}) {
    matrix.check_item(item);
    const auto column = matrix.column(item);
    auto totals = raw_totals(matrix);
    if (options.corrected) {
        for (std::size_t i = 0; i < totals.size(); ++i) {
            totals[i] -= column[i];
        }
    }
    return point_biserial(column, totals);
}

/// All per-item statistics, sharing one grouping pass.
inline std::vector<ItemCtt> analyze_items(const ResponseMatrix& matrix, PointBiserialOptions options = {}) {
    const auto totals = raw_totals(matrix);
    const auto groups = extreme_groups(totals);
    std::vector<ItemCtt> out;
    out.reserve(matrix.item_count());
    for (std::size_t j = 0; j < matrix.item_count(); ++j) {
        const auto column = matrix.column(j);
        ItemCtt item;
        item.item_index = j;
        item.difficulty = difficulty(column);
        const auto d = discrimination(column, groups);
        item.upper_prop = d.upper_prop;
        item.lower_prop = d.lower_prop;
        item.discrimination = d.index;
        if (options.corrected) {
            auto rest = totals;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                rest[i] -= column[i];
            }
            item.point_biserial = point_biserial(column, rest);
        } else {
            item.point_biserial = point_biserial(column, totals);
        }
        item.quality = classify_quality(item.discrimination);
        out.push_back(item);
    }
    return out;
}

struct QualityDistribution {
    std::array<std::size_t, 4> counts{};  // indexed like kAllQualities
    std::array<double, 4> percent{};      // rounded to one decimal
    std::size_t total = 0;

    std::size_t count(Quality q) const { return counts[static_cast<std::size_t>(q)]; }
};

inline QualityDistribution quality_distribution(std::span<const double> discriminations) {
    if (discriminations.empty()) {
        throw Error(ErrorKind::InsufficientData, "quality distribution of zero items");
    }
    QualityDistribution dist;
    for (double d : discriminations) {
        ++dist.counts[static_cast<std::size_t>(classify_quality(d))];
    }
    dist.total = discriminations.size();
    for (std::size_t b = 0; b < dist.counts.size(); ++b) {
        const double pct = 100.0 * static_cast<double>(dist.counts[b]) / static_cast<double>(dist.total);
        dist.percent[b] = std::round(pct * 10.0) / 10.0;
    }
    return dist;
}

inline QualityDistribution quality_distribution(std::span<const ItemCtt> items) {
    std::vector<double> d;
    d.reserve(items.size());
    for (const auto& item : items) {
        d.push_back(item.discrimination);
    }
    return quality_distribution(d);
}

} // namespace placemetrics::ctt

#endif
