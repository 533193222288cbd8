#ifndef PLACEMETRICS_CLUSTER_HPP
#define PLACEMETRICS_CLUSTER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "stats.hpp"

/**
 * @file cluster.hpp
 *
 * k-means over augmented score vectors [percent / 100, x_1 .. x_m] and the
 * validation stack used to choose and audit k: WCSS/elbow, silhouette, gap
 * statistic, bootstrap ARI stability and per-cluster profiles.
 */

namespace placemetrics::cluster {

/// Dense row-major point cloud.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t count, std::size_t dim) : count_(count), dim_(dim), data_(count * dim, 0.0) {}
    PointSet(std::size_t count, std::size_t dim, std::vector<double> data)
        : count_(count), dim_(dim), data_(std::move(data)) {
        if (data_.size() != count_ * dim_) {
            throw Error(ErrorKind::Validation, "point data size does not match count x dim");
        }
    }

    std::size_t size() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    void push_back(std::span<const double> point) {
        if (count_ == 0 && dim_ == 0) {
            dim_ = point.size();
        }
        if (point.size() != dim_) {
            throw Error(ErrorKind::Validation, "point dimension mismatch");
        }
        data_.insert(data_.end(), point.begin(), point.end());
        ++count_;
    }

    PointSet scaled(double factor) const {
        PointSet out = *this;
        for (auto& v : out.data_) {
            v *= factor;
        }
        return out;
    }

    bool operator==(const PointSet&) const = default;

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

inline double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

/// One point per student: [percent / 100, x_1, ..., x_m].
inline PointSet build_features(const ResponseMatrix& matrix) {
    PointSet points(matrix.student_count(), matrix.item_count() + 1);
    for (std::size_t i = 0; i < matrix.student_count(); ++i) {
        const auto& s = matrix.student(i);
        auto p = points[i];
        p[0] = total_score(s).percent / 100.0;
        for (std::size_t j = 0; j < matrix.item_count(); ++j) {
            p[j + 1] = s.responses[j];
        }
    }
    return points;
}

inline std::size_t distinct_count(const PointSet& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        const auto pa = points[a];
        const auto pb = points[b];
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
        distinct += less(order[i - 1], order[i]) ? 1 : 0;
    }
    return distinct;
}

struct KmeansOptions {
    std::size_t n_init = 20;
    std::size_t max_iter = 300;
    /// Convergence when the largest per-coordinate centroid move is below this.
    double tolerance = 1e-4;
};

struct ClusterSolution {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    PointSet centroids;
    double wcss = 0.0;
    std::optional<double> silhouette_mean;
    bool converged = false;
    std::size_t iterations = 0;
    /// WCSS after every centroid update of the winning run.
    std::vector<double> wcss_trace;
};

namespace detail {

inline std::size_t nearest(const PointSet& centroids, std::span<const double> p, double* best_distance = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (best_distance) {
        *best_distance = best_d;
    }
    return best;
}

inline double wcss_of(const PointSet& points, const PointSet& centroids, std::span<const std::size_t> assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += squared_distance(points[i], centroids[assignments[i]]);
    }
    return total;
}

/// k-means++ seeding.
inline PointSet plus_plus_init(const PointSet& points, std::size_t k, rng::Engine& engine) {
    PointSet centroids(k, points.dim());
    const auto first = static_cast<std::size_t>(rng::uniform_index(engine, points.size()));
    std::copy_n(points[first].begin(), points.dim(), centroids[0].begin());
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        d2[i] = squared_distance(points[i], centroids[0]);
    }
    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng::uniform_unit(engine) * total;
            double running = 0.0;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                running += d2[i];
                if (running > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (d2[pick] == 0.0) {
                --pick;
            }
        }
        std::copy_n(points[pick].begin(), points.dim(), centroids[c].begin());
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centroids[c]));
        }
    }
    return centroids;
}

/// Lloyd iterations from the given centroids.
inline ClusterSolution lloyd(const PointSet& points, PointSet centroids, const KmeansOptions& options) {
    const std::size_t k = centroids.size();
    const std::size_t dim = points.dim();
    ClusterSolution run;
    run.k = k;
    run.assignments.assign(points.size(), 0);
    std::vector<double> dist(points.size());
    std::vector<std::size_t> sizes(k);
    PointSet next(k, dim);

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            run.assignments[i] = nearest(centroids, points[i], &dist[i]);
            ++sizes[run.assignments[i]];
        }
        // Empty cluster: the point farthest from its centroid becomes a singleton.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            std::size_t far = points.size();
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (sizes[run.assignments[i]] > 1 && (far == points.size() || dist[i] > dist[far])) {
                    far = i;
                }
            }
            if (far == points.size()) {
                throw Error(ErrorKind::Infeasible, "k-means: cannot repair an empty cluster");
            }
            --sizes[run.assignments[far]];
            run.assignments[far] = c;
            sizes[c] = 1;
            dist[far] = 0.0;
        }

        next.fill(0.0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto target = next[run.assignments[i]];
            const auto p = points[i];
            for (std::size_t d = 0; d < dim; ++d) {
                target[d] += p[d];
            }
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            auto target = next[c];
            const auto old = centroids[c];
            for (std::size_t d = 0; d < dim; ++d) {
                target[d] /= static_cast<double>(sizes[c]);
                shift = std::max(shift, std::fabs(target[d] - old[d]));
            }
        }
        std::swap(centroids, next);
        run.iterations = iter;
        run.wcss_trace.push_back(wcss_of(points, centroids, run.assignments));
        if (shift < options.tolerance) {
            run.converged = true;
            break;
        }
    }
    run.wcss = run.wcss_trace.back();
    run.centroids = std::move(centroids);
    return run;
}

} // namespace detail

/**
 * Best-of-restarts k-means. Restart r seeds k-means++ from
 * derive_seed(seed, restart-stream, r). `warm_starts` are extra initial
 * centroid sets tried after the random restarts; they replace the incumbent
 * only on strictly lower WCSS.
 */
inline ClusterSolution kmeans(const PointSet& points, std::size_t k, std::uint64_t seed,
                              const KmeansOptions& options = {}, std::span<const PointSet> warm_starts = {}) {
    if (k == 0) {
        throw Error(ErrorKind::Domain, "k-means needs k >= 1");
    }
    if (options.n_init == 0 || options.max_iter == 0) {
        throw Error(ErrorKind::Config, "k-means needs at least one restart and one iteration");
    }
    const std::size_t distinct = distinct_count(points);
    if (k > distinct) {
        throw Error(ErrorKind::Infeasible, "k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct) +
                                               " distinct points");
    }
    std::optional<ClusterSolution> best;
    auto consider = [&](ClusterSolution candidate) {
        if (!best || candidate.wcss < best->wcss) {
            best = std::move(candidate);
        }
    };
    for (std::size_t r = 0; r < options.n_init; ++r) {
        auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kKmeansRestart, r));
        consider(detail::lloyd(points, detail::plus_plus_init(points, k, engine), options));
    }
    for (const auto& init : warm_starts) {
        if (init.size() != k || init.dim() != points.dim()) {
            throw Error(ErrorKind::Validation, "warm start has the wrong shape");
        }
        consider(detail::lloyd(points, init, options));
    }
    return std::move(*best);
}

struct SilhouetteResult {
    std::vector<double> per_point;
    double mean = 0.0;
};

/**
 * s(i) = (b - a) / max(a, b) with a = mean distance to the rest of i's
 * cluster and b = smallest mean distance to another cluster. Points alone in
 * their cluster score 0.
 */
inline SilhouetteResult silhouette(const PointSet& points, std::span<const std::size_t> assignments) {
    if (assignments.size() != points.size()) {
        throw Error(ErrorKind::Validation, "silhouette: assignment length mismatch");
    }
    std::map<std::size_t, std::size_t> ids;
    for (auto a : assignments) {
        ids.emplace(a, ids.size());
    }
    if (ids.size() < 2) {
        throw Error(ErrorKind::InsufficientData, "silhouette is undefined for a single cluster");
    }
    const std::size_t k = ids.size();
    std::vector<std::size_t> label(points.size());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        label[i] = ids[assignments[i]];
        ++sizes[label[i]];
    }

    SilhouetteResult result;
    result.per_point.resize(points.size());
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j != i) {
                sums[label[j]] += distance(points[i], points[j]);
            }
        }
        const std::size_t own = label[i];
        if (sizes[own] == 1) {
            result.per_point[i] = 0.0;
            continue;
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) {
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
            }
        }
        const double denom = std::max(a, b);
        result.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    result.mean = stats::mean(result.per_point);
    return result;
}

struct WcssCurve {
    std::vector<std::size_t> ks;
    std::vector<ClusterSolution> solutions;
    std::vector<double> wcss;
    /// k at the largest discrete second difference; needs three or more ks.
    std::optional<std::size_t> elbow;
};

/**
 * Best-of-restarts WCSS for k_min..k_max. For each k after the first, the
 * previous optimum plus its worst-fit point is added as a warm start, which
 * makes the curve non-increasing in k.
 */
inline WcssCurve wcss_curve(const PointSet& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                            const KmeansOptions& options = {}) {
    if (k_min == 0 || k_min > k_max) {
        throw Error(ErrorKind::Config, "invalid k range");
    }
    WcssCurve curve;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        std::vector<PointSet> warm;
        if (!curve.solutions.empty()) {
            const auto& prev = curve.solutions.back();
            std::size_t worst = 0;
            double worst_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double d = squared_distance(points[i], prev.centroids[prev.assignments[i]]);
                if (d > worst_d) {
                    worst_d = d;
                    worst = i;
                }
            }
            PointSet init = prev.centroids;
            init.push_back(points[worst]);
            warm.push_back(std::move(init));
        }
        curve.solutions.push_back(kmeans(points, k, seed, options, warm));
        curve.ks.push_back(k);
        curve.wcss.push_back(curve.solutions.back().wcss);
    }
    if (curve.wcss.size() >= 3) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < curve.wcss.size(); ++i) {
            const double second = curve.wcss[i - 1] - 2.0 * curve.wcss[i] + curve.wcss[i + 1];
            if (second > best) {
                best = second;
                curve.elbow = curve.ks[i];
            }
        }
    }
    return curve;
}

struct GapResult {
    double gap = 0.0;
    double se = 0.0;
    double log_wk = 0.0;
    std::vector<double> reference_log_wk;
};

inline constexpr std::size_t kDefaultGapReferences = 20;

/**
 * Gap statistic against uniform references in the data's bounding box;
 * se = sd(log W*) sqrt(1 + 1/B) with the 1/B standard deviation.
 */
inline GapResult gap_statistic(const PointSet& points, std::size_t k, std::uint64_t seed,
                               std::size_t b_refs = kDefaultGapReferences, const KmeansOptions& options = {},
                               std::optional<double> observed_wcss = std::nullopt) {
    if (b_refs == 0) {
        throw Error(ErrorKind::Config, "gap statistic needs at least one reference");
    }
    if (points.size() == 0) {
        throw Error(ErrorKind::InsufficientData, "gap statistic of an empty point set");
    }
    const std::size_t dim = points.dim();
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], points[i][d]);
            hi[d] = std::max(hi[d], points[i][d]);
        }
    }
    const double wk = observed_wcss.value_or(kmeans(points, k, seed, options).wcss);
    if (!(wk > 0.0)) {
        throw Error(ErrorKind::Domain, "gap statistic undefined for zero within-cluster dispersion");
    }

    GapResult result;
    result.log_wk = std::log(wk);
    result.reference_log_wk.resize(b_refs);
    for (std::size_t b = 0; b < b_refs; ++b) {
        auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kGapReference, b));
        PointSet reference(points.size(), dim);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto p = reference[i];
            for (std::size_t d = 0; d < dim; ++d) {
                p[d] = lo[d] == hi[d] ? lo[d] : rng::uniform_real(engine, lo[d], hi[d]);
            }
        }
        const auto ref = kmeans(reference, k, rng::derive_seed(seed, rng::stream::kGapReference, b_refs + b), options);
        if (!(ref.wcss > 0.0)) {
            throw Error(ErrorKind::Domain, "gap statistic: reference clustering has zero dispersion");
        }
        result.reference_log_wk[b] = std::log(ref.wcss);
    }
    const double mean_ref = stats::mean(result.reference_log_wk);
    double var = 0.0;
    for (double v : result.reference_log_wk) {
        var += (v - mean_ref) * (v - mean_ref);
    }
    var /= static_cast<double>(b_refs);
    result.gap = mean_ref - result.log_wk;
    result.se = std::sqrt(var) * std::sqrt(1.0 + 1.0 / static_cast<double>(b_refs));
    return result;
}

/// Pair-counting adjusted Rand index from the contingency table.
inline double adjusted_rand(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::Validation, "adjusted rand: partitions differ in length");
    }
    auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
    std::map<std::size_t, std::size_t> rows;
    std::map<std::size_t, std::size_t> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++cells[{a[i], b[i]}];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    double index = 0.0;
    for (const auto& [key, count] : cells) {
        index += comb2(static_cast<double>(count));
    }
    double sum_a = 0.0;
    for (const auto& [key, count] : rows) {
        sum_a += comb2(static_cast<double>(count));
    }
    double sum_b = 0.0;
    for (const auto& [key, count] : cols) {
        sum_b += comb2(static_cast<double>(count));
    }
    const double total = comb2(static_cast<double>(a.size()));
    const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) {
        return 1.0;
    }
    return (index - expected) / (max_index - expected);
}

struct StabilityReport {
    double mean_ari = 0.0;
    std::array<double, 2> ci95{};
    std::vector<double> per_iteration_ari;
};

inline constexpr std::size_t kDefaultBootstrapIterations = 100;

/**
 * Bootstrap stability against a reference solution: each iteration clusters
 * a with-replacement resample, assigns every original point to its nearest
 * bootstrap centroid and scores the ARI against the reference assignments.
 */
inline StabilityReport bootstrap_stability(const PointSet& points, const ClusterSolution& reference,
                                           std::size_t iterations, std::uint64_t seed,
                                           const KmeansOptions& options = {}, std::size_t workers = 1) {
    if (iterations == 0) {
        throw Error(ErrorKind::Config, "bootstrap needs at least one iteration");
    }
    StabilityReport report;
    report.per_iteration_ari.resize(iterations);
    parallel_for(iterations, workers, [&](std::size_t it) {
        auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kBootstrap, it));
        PointSet sample(points.size(), points.dim());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto src = static_cast<std::size_t>(rng::uniform_index(engine, points.size()));
            std::copy_n(points[src].begin(), points.dim(), sample[i].begin());
        }
        const auto fit = kmeans(sample, reference.k,
                                rng::derive_seed(seed, rng::stream::kBootstrap, iterations + it), options);
        std::vector<std::size_t> assigned(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            assigned[i] = detail::nearest(fit.centroids, points[i]);
        }
        report.per_iteration_ari[it] = adjusted_rand(reference.assignments, assigned);
    });
    report.mean_ari = stats::mean(report.per_iteration_ari);
    report.ci95 = {std::clamp(stats::quantile(report.per_iteration_ari, 0.025), -1.0, 1.0),
                   std::clamp(stats::quantile(report.per_iteration_ari, 0.975), -1.0, 1.0)};
    return report;
}

inline StabilityReport bootstrap_stability(const PointSet& points, std::size_t k, std::size_t iterations,
                                           std::uint64_t seed, const KmeansOptions& options = {},
                                           std::size_t workers = 1) {
    return bootstrap_stability(points, kmeans(points, k, seed, options), iterations, seed, options, workers);
}

struct ClusterStats {
    std::size_t cluster_id = 0;  ///< id in the solution's assignments
    std::size_t n = 0;
    double mean_pct = 0.0;
    double sd_pct = 0.0;
    double min_pct = 0.0;
    double max_pct = 0.0;
    std::optional<LabelCounts> label_counts;
    std::optional<double> purity;
};

struct ClusterProfile {
    /// Ordered by ascending mean percent score.
    std::vector<ClusterStats> clusters;
    /// Highest percent score inside the lowest-scoring cluster.
    double natural_boundary = 0.0;
};

inline ClusterProfile cluster_profile(const ClusterSolution& solution, const ResponseMatrix& matrix) {
    if (solution.assignments.size() != matrix.student_count()) {
        throw Error(ErrorKind::Validation, "cluster profile: solution and matrix differ in size");
    }
    const auto pct = percent_scores(matrix);
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < pct.size(); ++i) {
        members[solution.assignments[i]].push_back(i);
    }
    ClusterProfile profile;
    for (const auto& [id, rows] : members) {
        ClusterStats c;
        c.cluster_id = id;
        c.n = rows.size();
        std::vector<double> values;
        for (auto r : rows) {
            values.push_back(pct[r]);
        }
        c.mean_pct = stats::mean(values);
        c.sd_pct = stats::sample_sd(values);
        c.min_pct = *std::min_element(values.begin(), values.end());
        c.max_pct = *std::max_element(values.begin(), values.end());
        if (matrix.has_labels()) {
            LabelCounts counts{};
            for (auto r : rows) {
                ++counts[rank(matrix.label(r))];
            }
            c.label_counts = counts;
            c.purity = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                       static_cast<double>(c.n);
        }
        profile.clusters.push_back(c);
    }
    std::stable_sort(profile.clusters.begin(), profile.clusters.end(),
                     [](const ClusterStats& a, const ClusterStats& b) { return a.mean_pct < b.mean_pct; });
    if (!profile.clusters.empty()) {
        profile.natural_boundary = profile.clusters.front().max_pct;
    }
    return profile;
}

} // namespace placemetrics::cluster

#endif
