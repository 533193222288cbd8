// Build the reference cohort, then run the three analyses on it.

#include <cstdio>

#include <placemetrics/cluster.hpp>
#include <placemetrics/ctt.hpp>
#include <placemetrics/featstats.hpp>
#include <placemetrics/forest.hpp>
#include <placemetrics/synth.hpp>

int main() {
    namespace pm = placemetrics;
    const auto cohort = pm::synth::reconstructed_cohort(42);
    const auto& matrix = cohort.matrix;

    const auto items = pm::ctt::analyze_items(matrix);
    const auto bands = pm::ctt::quality_distribution(items);
    std::printf("items: %zu  excellent: %zu  poor: %zu\n", items.size(), bands.count(pm::ctt::Quality::Excellent),
                bands.count(pm::ctt::Quality::Poor));

    const auto q6 = pm::featstats::anova_f(matrix, 5);
    std::printf("Q6: F = %.1f  log10 p = %.1f\n", q6.f_stat, q6.log10_p);

    const auto data = pm::forest::Dataset::from(matrix);
    const auto cv = pm::forest::cross_validate(data, {}, 5, 42, 4);
    std::printf("forest CV accuracy: %.3f +/- %.3f\n", cv.mean, cv.sd);

    const auto points = pm::cluster::build_features(matrix);
    const auto two = pm::cluster::kmeans(points, 2, 42);
    const auto profile = pm::cluster::cluster_profile(two, matrix);
    std::printf("k = 2 silhouette %.3f, boundary at %.1f%%\n",
                pm::cluster::silhouette(points, two.assignments).mean, profile.natural_boundary);
}
