#ifndef PLACEMETRICS_SYNTH_HPP
#define PLACEMETRICS_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "appendix_a.hpp"
#include "core.hpp"
#include "ctt.hpp"
#include "error.hpp"
#include "random.hpp"

/**
 * @file synth.hpp
 *
 * Synthetic cohorts. `reconstruct_exact` rebuilds a labelled matrix whose
 * per-item, per-group correct counts match a marginal specification exactly.
 * `simulate_2pl` draws responses from a two-parameter logistic model and
 * `calibrate_items` fits (a, b) pairs to target difficulty and
 * discrimination targets.
 */

namespace placemetrics::synth {

inline std::string student_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%04zu", index + 1);
    return buf;
}

struct MarginalSpec {
    LabelCounts group_sizes{};
    /// Per item, correct answers in each placement group.
    std::vector<LabelCounts> per_item_group_correct;
    /// Optional per-item difficulty; when given it must agree with the counts to 3 decimals.
    std::vector<double> per_item_difficulty;
};

inline void validate(const MarginalSpec& spec) {
    const std::size_t n = std::accumulate(spec.group_sizes.begin(), spec.group_sizes.end(), std::size_t{0});
    if (n == 0) {
        throw Error(ErrorKind::Validation, "marginal spec has no students");
    }
    if (spec.per_item_group_correct.empty()) {
        throw Error(ErrorKind::Validation, "marginal spec has no items");
    }
    if (!spec.per_item_difficulty.empty() && spec.per_item_difficulty.size() != spec.per_item_group_correct.size()) {
        throw Error(ErrorKind::Validation, "difficulty targets and item counts differ in length");
    }
    for (std::size_t j = 0; j < spec.per_item_group_correct.size(); ++j) {
        std::size_t correct = 0;
        for (std::size_t k = 0; k < kLabelCount; ++k) {
            if (spec.per_item_group_correct[j][k] > spec.group_sizes[k]) {
                throw Error(ErrorKind::Validation, "item " + std::to_string(j) + ": correct count exceeds group " +
                                                       std::string(to_string(label_from_rank(k))));
            }
            correct += spec.per_item_group_correct[j][k];
        }
        if (!spec.per_item_difficulty.empty()) {
            const double p = static_cast<double>(correct) / static_cast<double>(n);
            if (std::fabs(p - spec.per_item_difficulty[j]) > 0.0005 + 1e-12) {
                throw Error(ErrorKind::Validation, "item " + std::to_string(j) +
                                                       ": difficulty target disagrees with group counts");
            }
        }
    }
}

/**
 * Labelled matrix with the exact per-group counts of `spec`. Students are
 * laid out group by group in rank order; which members of a group answer an
 * item correctly is a seeded shuffle.
 */
inline ResponseMatrix reconstruct_exact(const MarginalSpec& spec, std::uint64_t seed) {
    validate(spec);
    const std::size_t items = spec.per_item_group_correct.size();
    std::vector<StudentRecord> students;
    std::array<std::vector<std::size_t>, kLabelCount> members;
    for (std::size_t k = 0; k < kLabelCount; ++k) {
        for (std::size_t i = 0; i < spec.group_sizes[k]; ++i) {
            members[k].push_back(students.size());
            students.push_back({student_id(students.size()), std::vector<std::uint8_t>(items, 0), label_from_rank(k)});
        }
    }
    for (std::size_t j = 0; j < items; ++j) {
        for (std::size_t k = 0; k < kLabelCount; ++k) {
            auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kReconstruct, j * kLabelCount + k));
            auto order = members[k];
            rng::shuffle(std::span(order), engine);
            for (std::size_t c = 0; c < spec.per_item_group_correct[j][k]; ++c) {
                students[order[c]].responses[j] = 1;
            }
        }
    }
    return ResponseMatrix(std::move(students), items);
}

struct TwoPLItem {
    double a = 1.0;  ///< slope, > 0
    double b = 0.0;  ///< location on the logit scale

    bool operator==(const TwoPLItem&) const = default;
};

inline double logistic(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

inline double response_probability(const TwoPLItem& item, double theta) {
    return logistic(item.a * (theta - item.b));
}

struct SimulatedCohort {
    ResponseMatrix matrix;
    std::vector<double> theta;
};

namespace detail {

inline std::vector<std::uint8_t> draw_responses(std::span<const TwoPLItem> items, double theta, rng::Engine& engine) {
    std::vector<std::uint8_t> row(items.size());
    for (std::size_t j = 0; j < items.size(); ++j) {
        row[j] = rng::uniform_unit(engine) < response_probability(items[j], theta) ? 1 : 0;
    }
    return row;
}

inline void check_items(std::span<const TwoPLItem> items) {
    if (items.empty()) {
        throw Error(ErrorKind::Validation, "2PL simulation needs at least one item");
    }
    for (std::size_t j = 0; j < items.size(); ++j) {
        if (!(items[j].a > 0.0) || !std::isfinite(items[j].b)) {
            throw Error(ErrorKind::Validation, "2PL item " + std::to_string(j) + " needs a > 0 and finite b");
        }
    }
}

} // namespace detail

/// theta ~ N(0, 1); P(x_ij = 1) = logistic(a_j (theta_i - b_j)); labels by cut score.
inline SimulatedCohort simulate_2pl(std::span<const TwoPLItem> items, std::size_t n, std::uint64_t seed) {
    detail::check_items(items);
    if (n == 0) {
        throw Error(ErrorKind::Validation, "2PL simulation needs n >= 1");
    }
    auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kSimulation));
    SimulatedCohort cohort;
    std::vector<StudentRecord> students;
    students.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = rng::standard_normal(engine);
        auto row = detail::draw_responses(items, theta, engine);
        const auto label = placement(total_score(row).percent);
        students.push_back({student_id(i), std::move(row), label});
        cohort.theta.push_back(theta);
    }
    cohort.matrix = ResponseMatrix(std::move(students), items.size());
    return cohort;
}

/// Gauss-Hermite rule for weight exp(-x^2).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the orthonormal Hermite recurrence.
inline GaussHermite gauss_hermite(std::size_t order) {
    GaussHermite rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const std::size_t half = (order + 1) / 2;
    double z = 0.0;
    const auto nd = static_cast<double>(order);
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(nd, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                const auto jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
            }
            derivative = std::sqrt(2.0 * nd) * p2;
            const double previous = z;
            z = previous - p1 / derivative;
            if (std::fabs(z - previous) <= 1e-14) {
                break;
            }
        }
        rule.nodes[i] = z;
        rule.nodes[order - 1 - i] = -z;
        rule.weights[i] = 2.0 / (derivative * derivative);
        rule.weights[order - 1 - i] = rule.weights[i];
    }
    return rule;
}

inline constexpr std::size_t kQuadratureOrder = 61;

inline const GaussHermite& standard_quadrature() {
    static const GaussHermite rule = gauss_hermite(kQuadratureOrder);
    return rule;
}

/// P(correct) marginalized over theta ~ N(0, 1).
inline double marginal_difficulty(const TwoPLItem& item) {
    const auto& rule = standard_quadrature();
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        total += rule.weights[i] * response_probability(item, std::numbers::sqrt2 * rule.nodes[i]);
    }
    return total / std::sqrt(std::numbers::pi);
}

inline constexpr double kMinTargetDifficulty = 0.01;
inline constexpr double kMaxTargetDifficulty = 0.99;

/// Location b for which the marginal difficulty equals `target`, by bisection.
inline std::optional<double> solve_location(double slope, double target) {
    double lo = -20.0;
    double hi = 20.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        // marginal difficulty decreases in b
        if (marginal_difficulty({slope, mid}) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double b = 0.5 * (lo + hi);
    if (std::fabs(marginal_difficulty({slope, b}) - target) > 1e-6) {
        return std::nullopt;
    }
    return b;
}

/// Initial slope from a discrimination target: a = 0.5 + 4.5 D, D clamped to [0, 1].
inline double slope_from_discrimination(double discrimination) {
    return 0.5 + 4.5 * std::clamp(discrimination, 0.0, 1.0);
}

inline constexpr double kMinSlope = 0.2;
inline constexpr double kMaxSlope = 8.0;
inline constexpr std::size_t kRefinementCohort = 2000;
inline constexpr double kDifficultyTolerance = 0.02;

/**
 * Fits 2PL items to difficulty and discrimination targets.
 *
 * 1. a_j from `slope_from_discrimination`, b_j so the theta-marginal
 *    difficulty equals the (clamped) target.
 * 2. One refinement pass: simulate a cohort, compare its discrimination
 *    with the target, scale a_j by target / observed (factor in [0.5, 2]),
 *    and re-solve b_j.
 */
inline std::vector<TwoPLItem> calibrate_items(std::span<const double> target_p, std::span<const double> target_d,
                                              std::uint64_t seed) {
    if (target_p.size() != target_d.size() || target_p.empty()) {
        throw Error(ErrorKind::Validation, "calibration targets must be non-empty and equally long");
    }
    const std::size_t m = target_p.size();
    std::vector<double> p(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (!(target_p[j] >= 0.0 && target_p[j] <= 1.0)) {
            throw Error(ErrorKind::Domain, "difficulty target outside [0, 1]");
        }
        p[j] = std::clamp(target_p[j], kMinTargetDifficulty, kMaxTargetDifficulty);
    }

    std::vector<TwoPLItem> items(m);
    auto solve_all = [&] {
        std::string failed;
        for (std::size_t j = 0; j < m; ++j) {
            const auto b = solve_location(items[j].a, p[j]);
            if (!b || std::fabs(marginal_difficulty({items[j].a, *b}) - p[j]) > kDifficultyTolerance) {
                failed += (failed.empty() ? "" : ",") + std::to_string(j + 1);
                continue;
            }
            items[j].b = *b;
        }
        if (!failed.empty()) {
            throw Error(ErrorKind::Calibration, "calibration did not converge for items " + failed);
        }
    };

    for (std::size_t j = 0; j < m; ++j) {
        items[j].a = slope_from_discrimination(target_d[j]);
    }
    solve_all();

    const auto trial = simulate_2pl(items, kRefinementCohort, rng::derive_seed(seed, rng::stream::kCalibration));
    const auto observed = ctt::analyze_items(trial.matrix);
    for (std::size_t j = 0; j < m; ++j) {
        const double seen = observed[j].discrimination;
        const double factor = seen > 0.0 ? std::clamp(target_d[j] / seen, 0.5, 2.0) : 2.0;
        items[j].a = std::clamp(items[j].a * factor, kMinSlope, kMaxSlope);
    }
    solve_all();
    return items;
}

inline std::vector<TwoPLItem> calibrate_to_appendix(std::uint64_t seed) {
    return calibrate_items(appendix_a::kDifficulty, appendix_a::kDiscrimination, seed);
}

struct CohortRecipe {
    std::vector<TwoPLItem> items;
    LabelCounts quotas{};
    /// Item forced to separate College Algebra from the other groups.
    std::optional<std::size_t> signature_item;
    /// College Algebra students who still answer the signature item correctly.
    std::size_t signature_low_correct = 0;
    std::size_t max_draws = 2'000'000;
};

/**
 * Quota cohort: students are drawn from the 2PL model and kept only while
 * their cut-score label still has room, so label counts equal `quotas`.
 *
 * With a signature item, its response is not drawn: it is 1 for every
 * Precalculus and Calculus I student and for the first
 * `signature_low_correct` College Algebra students whose label survives the
 * extra point, and 0 otherwise. Labels are computed from the final row, so
 * the cohort stays consistent with the cut-score rule.
 */
inline SimulatedCohort quota_cohort(const CohortRecipe& recipe, std::uint64_t seed) {
    detail::check_items(recipe.items);
    const std::size_t m = recipe.items.size();
    if (recipe.signature_item && *recipe.signature_item >= m) {
        throw Error(ErrorKind::Domain, "signature item out of range");
    }
    const std::size_t n = std::accumulate(recipe.quotas.begin(), recipe.quotas.end(), std::size_t{0});
    if (n == 0) {
        throw Error(ErrorKind::Validation, "quota cohort needs a positive total");
    }
    if (recipe.signature_item && recipe.signature_low_correct > recipe.quotas[0]) {
        throw Error(ErrorKind::Validation, "signature low-group correct count exceeds its quota");
    }

    auto engine = rng::make_engine(rng::derive_seed(seed, rng::stream::kSimulation, 1));
    LabelCounts filled{};
    std::size_t low_correct = 0;
    SimulatedCohort cohort;
    std::vector<StudentRecord> students;
    for (std::size_t draw = 0; draw < recipe.max_draws && students.size() < n; ++draw) {
        const double theta = rng::standard_normal(engine);
        auto row = detail::draw_responses(recipe.items, theta, engine);
        std::optional<PlacementLabel> label;
        if (recipe.signature_item) {
            const std::size_t sig = *recipe.signature_item;
            row[sig] = 1;
            const auto with_point = placement(total_score(row).percent);
            if (with_point != PlacementLabel::CollegeAlgebra) {
                if (filled[rank(with_point)] < recipe.quotas[rank(with_point)]) {
                    label = with_point;
                }
            } else if (filled[0] < recipe.quotas[0]) {
                if (low_correct < recipe.signature_low_correct) {
                    ++low_correct;
                } else {
                    row[sig] = 0;
                }
                label = PlacementLabel::CollegeAlgebra;
            }
            if (!label) {
                row[sig] = 0;
                const auto without_point = placement(total_score(row).percent);
                if (without_point == PlacementLabel::CollegeAlgebra && filled[0] < recipe.quotas[0] &&
                    low_correct >= recipe.signature_low_correct) {
                    label = without_point;
                }
            }
        } else {
            const auto l = placement(total_score(row).percent);
            if (filled[rank(l)] < recipe.quotas[rank(l)]) {
                label = l;
            }
        }
        if (!label) {
            continue;
        }
        ++filled[rank(*label)];
        students.push_back({student_id(students.size()), std::move(row), *label});
        cohort.theta.push_back(theta);
    }
    if (students.size() < n) {
        throw Error(ErrorKind::Calibration, "quota cohort: quotas not met within the draw limit");
    }
    cohort.matrix = ResponseMatrix(std::move(students), m);
    return cohort;
}

/**
 * The reference cohort for desk-scale checks: items calibrated to the
 * reference item table, 198 students with label counts 118/59/21, and Q6
 * answered correctly by every Precalculus and Calculus I student and by one
 * College Algebra student.
 */
inline SimulatedCohort reconstructed_cohort(std::uint64_t seed) {
    CohortRecipe recipe;
    recipe.items = calibrate_to_appendix(seed);
    recipe.quotas = appendix_a::kGroupSizes;
    recipe.signature_item = appendix_a::kQ6Index;
    recipe.signature_low_correct = appendix_a::kQ6GroupCorrect[0];
    return quota_cohort(recipe, seed);
}

} // namespace placemetrics::synth

#endif
