#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <placemetrics/appendix_a.hpp>
#include <placemetrics/ctt.hpp>
#include <placemetrics/featstats.hpp>
#include <placemetrics/stats.hpp>
#include <placemetrics/synth.hpp>

namespace pm = placemetrics;
namespace sy = placemetrics::synth;
using pm::PlacementLabel;

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

double oracle_marginal(double a, double b) {
    auto f = [&](double t) {
        return 1.0 / (1.0 + std::exp(-a * (t - b))) * std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -15.0, 15.0, 15, 1e-14);
}

} // namespace

TEST(Reconstruct, SignatureItemCounts) {
    sy::MarginalSpec spec;
    spec.group_sizes = pm::appendix_a::kGroupSizes;
    spec.per_item_group_correct = {pm::appendix_a::kQ6GroupCorrect};
    spec.per_item_difficulty = {0.409};
    const auto m = sy::reconstruct_exact(spec, 42);
    EXPECT_EQ(m.student_count(), 198u);
    EXPECT_DOUBLE_EQ(pm::ctt::difficulty(m, 0), 81.0 / 198.0);
    const auto t = pm::featstats::tabulate(m, 0);
    EXPECT_EQ(t.sizes, (pm::LabelCounts{118, 59, 21}));
    EXPECT_EQ(t.correct, (pm::LabelCounts{1, 59, 21}));
}

TEST(Reconstruct, RecountEqualsSpecForAnySeed) {
    sy::MarginalSpec spec;
    spec.group_sizes = {30, 20, 10};
    spec.per_item_group_correct = {{0, 0, 0}, {30, 20, 10}, {7, 13, 9}, {15, 0, 10}};
    for (std::uint64_t seed : {1u, 2u, 77u}) {
        const auto m = sy::reconstruct_exact(spec, seed);
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(pm::featstats::tabulate(m, j).correct, spec.per_item_group_correct[j]);
    }
    const auto all = sy::reconstruct_exact(spec, 5);
    for (std::size_t i = 0; i < all.student_count(); ++i) EXPECT_EQ(all.at(i, 1), 1);
    EXPECT_NE(sy::reconstruct_exact(spec, 1).students(), sy::reconstruct_exact(spec, 2).students());
}

TEST(Reconstruct, InconsistentSpecRejected) {
    sy::MarginalSpec spec;
    spec.group_sizes = {10, 5, 5};
    spec.per_item_group_correct = {{11, 0, 0}};
    EXPECT_THROW(sy::reconstruct_exact(spec, 1), pm::Error);
    spec.per_item_group_correct = {{5, 5, 0}};
    spec.per_item_difficulty = {0.9};
    EXPECT_THROW(sy::reconstruct_exact(spec, 1), pm::Error);
}

TEST(Simulate, FlatSlopesGiveCoinFlips) {
    const std::vector<sy::TwoPLItem> items(10, {1e-9, 0.0});
    const auto c = sy::simulate_2pl(items, 2000, 3);
    for (const auto& it : pm::ctt::analyze_items(c.matrix)) EXPECT_NEAR(it.difficulty, 0.5, 0.05);
}

TEST(Simulate, EasyItemsSaturate) {
    const std::vector<sy::TwoPLItem> items(5, {1.7, -4.0});
    const auto c = sy::simulate_2pl(items, 1000, 4);
    for (const auto& it : pm::ctt::analyze_items(c.matrix)) EXPECT_GT(it.difficulty, 0.95);
}

TEST(Simulate, LabelsFollowCutScores) {
    const auto items = sy::calibrate_to_appendix(42);
    const auto c = sy::simulate_2pl(items, 300, 8);
    for (const auto& s : c.matrix.students()) EXPECT_EQ(*s.label, pm::placement(pm::total_score(s).percent));
}

TEST(Simulate, TotalsIncreaseWithAbility) {
    const auto items = sy::calibrate_to_appendix(42);
    const auto c = sy::simulate_2pl(items, 1000, 5);
    const auto totals = pm::raw_totals(c.matrix);
    const double spearman = *pm::stats::pearson(ranks(c.theta), ranks(totals));
    EXPECT_GT(spearman, 0.8);
}

TEST(Simulate, SteeperSlopeRaisesPointBiserial) {
    std::vector<sy::TwoPLItem> items(20, {1.5, 0.0});
    for (std::size_t j = 0; j < items.size(); ++j) items[j].b = -1.5 + 0.15 * static_cast<double>(j);
    const auto base = pm::ctt::analyze_items(sy::simulate_2pl(items, 2000, 6).matrix);
    auto steeper = items;
    steeper[7].a = 4.0;
    const auto raised = pm::ctt::analyze_items(sy::simulate_2pl(steeper, 2000, 6).matrix);
    EXPECT_GT(*raised[7].point_biserial, *base[7].point_biserial);
}

TEST(Quadrature, HermiteRule) {
    const auto& rule = sy::standard_quadrature();
    ASSERT_EQ(rule.nodes.size(), 61u);
    const double sum = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    EXPECT_NEAR(sum, std::sqrt(std::numbers::pi), 1e-12);
    // Second moment: sum w x^2 = sqrt(pi) / 2.
    double m2 = 0.0;
    for (std::size_t i = 0; i < 61; ++i) m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    EXPECT_NEAR(m2, std::sqrt(std::numbers::pi) / 2.0, 1e-12);
}

TEST(Quadrature, MarginalDifficultyMatchesAdaptiveIntegration) {
    for (double a : {0.3, 1.0, 2.0, 3.0}) {
        for (double b : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
            EXPECT_NEAR(sy::marginal_difficulty({a, b}), oracle_marginal(a, b), 1e-6) << a << ' ' << b;
        }
    }
    // Steep slopes converge slowly under a fixed 61-point rule; still far inside calibration tolerance.
    for (const auto& [a, tol] : {std::pair{5.0, 1e-4}, std::pair{sy::kMaxSlope, 2e-3}}) {
        for (double b : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
            EXPECT_NEAR(sy::marginal_difficulty({a, b}), oracle_marginal(a, b), tol) << a << ' ' << b;
        }
    }
}

TEST(Calibration, LocationSolving) {
    EXPECT_NEAR(*sy::solve_location(2.0, 0.5), 0.0, 1e-9);
    const auto easy = sy::solve_location(sy::slope_from_discrimination(0.019), 0.934);
    ASSERT_TRUE(easy);
    EXPECT_LT(*easy, -2.0);
    for (double p : {0.04, 0.3, 0.7, 0.96}) {
        const double b = *sy::solve_location(3.0, p);
        EXPECT_NEAR(sy::marginal_difficulty({3.0, b}), p, 1e-6);
    }
}

TEST(Calibration, SlopeMapIsMonotone) {
    for (double d = 0.0; d < 1.0; d += 0.05) {
        EXPECT_LT(sy::slope_from_discrimination(d), sy::slope_from_discrimination(d + 0.05));
    }
}

TEST(Calibration, ReferenceTableReproducedAtThousandStudents) {
    const auto items = sy::calibrate_to_appendix(42);
    ASSERT_EQ(items.size(), 40u);
    for (std::size_t j = 0; j < items.size(); ++j) {
        EXPECT_GT(items[j].a, 0.0);
        EXPECT_NEAR(sy::marginal_difficulty(items[j]), pm::appendix_a::kDifficulty[j], 0.02);
    }
    const auto c = sy::simulate_2pl(items, 1000, 2718);
    const auto achieved = pm::ctt::analyze_items(c.matrix);
    double worst = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
        worst = std::max(worst, std::fabs(achieved[j].difficulty - pm::appendix_a::kDifficulty[j]));
    }
    EXPECT_LE(worst, 0.05);
    EXPECT_EQ(sy::calibrate_to_appendix(42), items);
}

TEST(Cohort, ReconstructedCohortQuotas) {
    const auto c = sy::reconstructed_cohort(42);
    const auto& m = c.matrix;
    EXPECT_EQ(m.student_count(), 198u);
    EXPECT_EQ(m.label_counts(), (pm::LabelCounts{118, 59, 21}));
    for (const auto& s : m.students()) EXPECT_EQ(*s.label, pm::placement(pm::total_score(s).percent));
    EXPECT_EQ(pm::featstats::tabulate(m, 5).correct, (pm::LabelCounts{1, 59, 21}));
    EXPECT_EQ(sy::reconstructed_cohort(42).matrix, m);
}
