#ifndef PLACEMETRICS_STATS_HPP
#define PLACEMETRICS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"

namespace placemetrics::stats {

inline double mean(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::InsufficientData, "mean of an empty sequence");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

/// Sample variance (n - 1 denominator); zero for a single value.
inline double sample_variance(std::span<const double> values) {
    const double mu = mean(values);
    if (values.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mu) * (v - mu);
    }
    return ss / static_cast<double>(values.size() - 1);
}

inline double sample_sd(std::span<const double> values) { return std::sqrt(sample_variance(values)); }

/// Quantile of already-sorted data by linear interpolation between order
/// statistics: h = (n - 1) q, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw Error(ErrorKind::InsufficientData, "quantile of an empty sequence");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorKind::Domain, "quantile level outside [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> values, double q) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, q);
}

/// Pearson correlation; absent when either input has zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorKind::Validation, "pearson: length mismatch");
    }
    if (x.size() < 2) {
        return std::nullopt;
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace placemetrics::stats

#endif
