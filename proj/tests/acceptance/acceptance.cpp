// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <placemetrics/appendix_a.hpp>
#include <placemetrics/cluster.hpp>
#include <placemetrics/ctt.hpp>
#include <placemetrics/featstats.hpp>
#include <placemetrics/forest.hpp>
#include <placemetrics/io/report.hpp>
#include <placemetrics/synth.hpp>

namespace pm = placemetrics;
namespace fs = std::filesystem;
using Rational = boost::multiprecision::cpp_rational;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t draw(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

pm::ResponseMatrix random_matrix(std::mt19937_64& gen, std::size_t n, std::size_t m, bool labelled) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<pm::StudentRecord> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double rate = unit(gen);
        pm::StudentRecord r{pm::synth::student_id(i), {}, std::nullopt};
        for (std::size_t j = 0; j < m; ++j) r.responses.push_back(unit(gen) < rate ? 1 : 0);
        if (labelled) r.label = pm::placement(100.0 * static_cast<double>(std::count(r.responses.begin(), r.responses.end(), 1)) / static_cast<double>(m));
        rows.push_back(std::move(r));
    }
    return pm::ResponseMatrix(std::move(rows), m);
}

pm::ResponseMatrix q6_cohort() {
    pm::synth::MarginalSpec spec;
    spec.group_sizes = pm::appendix_a::kGroupSizes;
    spec.per_item_group_correct = {pm::appendix_a::kQ6GroupCorrect};
    return pm::synth::reconstruct_exact(spec, kSeed);
}

const pm::ResponseMatrix& cohort() {
    static const pm::ResponseMatrix m = pm::synth::reconstructed_cohort(kSeed).matrix;
    return m;
}

// ---- oracles

struct CttOracle {
    double p;
    double d;
    std::optional<double> r;
};

CttOracle ctt_oracle(const pm::ResponseMatrix& m, std::size_t item) {
    const std::size_t n = m.student_count();
    std::vector<std::pair<double, std::size_t>> tot;
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m.item_count(); ++j) total[i] += m.at(i, j);
        tot.emplace_back(total[i], i);
    }
    const std::size_t g = 27 * n / 100;
    auto up = tot;
    std::sort(up.begin(), up.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    auto lo = tot;
    std::sort(lo.begin(), lo.end());
    double u = 0, l = 0, ones = 0, s1 = 0, s0 = 0;
    for (std::size_t k = 0; k < g; ++k) {
        u += m.at(up[k].second, item);
        l += m.at(lo[k].second, item);
    }
    for (std::size_t i = 0; i < n; ++i) (m.at(i, item) ? (ones += 1, s1) : s0) += total[i];
    CttOracle o{ones / static_cast<double>(n), (u - l) / static_cast<double>(g), std::nullopt};
    const double mean = std::accumulate(total.begin(), total.end(), 0.0) / static_cast<double>(n);
    double var = 0;
    for (double t : total) var += (t - mean) * (t - mean);
    var /= static_cast<double>(n);
    if (ones > 0 && ones < static_cast<double>(n) && var > 0) {
        o.r = (s1 / ones - s0 / (static_cast<double>(n) - ones)) / std::sqrt(var) * std::sqrt(o.p * (1 - o.p));
    }
    return o;
}

std::optional<std::pair<std::size_t, Rational>> split_oracle(const pm::forest::Dataset& d, const std::vector<std::size_t>& s,
                                                             const std::vector<std::size_t>& cand) {
    auto gini = [](const std::array<long, 3>& c) {
        const long n = c[0] + c[1] + c[2];
        Rational g = 1;
        for (long k : c) g -= Rational(k * k, n * n);
        return g;
    };
    std::array<long, 3> parent{};
    for (auto i : s) ++parent[d.y[i]];
    const long n = static_cast<long>(s.size());
    std::optional<std::pair<std::size_t, Rational>> best;
    for (std::size_t f = 0; f < d.cols; ++f) {
        if (std::find(cand.begin(), cand.end(), f) == cand.end()) continue;
        std::array<long, 3> l{}, r{};
        for (auto i : s) ++(d.at(i, f) ? r : l)[d.y[i]];
        const long nl = l[0] + l[1] + l[2], nr = r[0] + r[1] + r[2];
        if (nl == 0 || nr == 0) continue;
        const Rational gain = gini(parent) - Rational(nl, n) * gini(l) - Rational(nr, n) * gini(r);
        if (gain > 0 && (!best || gain > best->second)) best = std::make_pair(f, gain);
    }
    return best;
}

double silhouette_oracle(const pm::cluster::PointSet& p, const std::vector<std::size_t>& a, std::size_t k) {
    double total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> sum(k, 0), cnt(k, 0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (i == j) continue;
            sum[a[j]] += pm::cluster::distance(p[i], p[j]);
            cnt[a[j]] += 1;
        }
        if (cnt[a[i]] == 0) continue;
        const double ai = sum[a[i]] / cnt[a[i]];
        double bi = INFINITY;
        for (std::size_t c = 0; c < k; ++c)
            if (c != a[i] && cnt[c] > 0) bi = std::min(bi, sum[c] / cnt[c]);
        const double m = std::max(ai, bi);
        total += m > 0 ? (bi - ai) / m : 0.0;
    }
    return total / static_cast<double>(p.size());
}

double ari_oracle(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    double ss = 0, sd = 0, ds = 0, dd = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            ((x[i] == x[j]) ? ((y[i] == y[j]) ? ss : sd) : ((y[i] == y[j]) ? ds : dd)) += 1;
    const double den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    return den == 0 ? 1.0 : 2 * (ss * dd - sd * ds) / den;
}

// ---- criteria

Outcome signature_anova() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto r = pm::featstats::anova_f(q6_cohort(), 0);
    const double secs = seconds_since(t0);
    o.check(std::fabs(r.f_stat - 4609.1) <= 0.5, "F=" + fmt("%.2f", r.f_stat));
    o.check(std::fabs(r.log10_p + 164.2) <= 0.5, "log10 p=" + fmt("%.3f", r.log10_p));
    o.check(secs < 1.0, "time " + fmt("%.3fs", secs));
    return o;
}

Outcome signature_mi() {
    Outcome o;
    const double mi = pm::featstats::mutual_info(q6_cohort(), 0);
    o.check(std::fabs(mi - 0.647) <= 0.005, "MI=" + fmt("%.4f", mi) + " nats");
    return o;
}

Outcome rule_baseline() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 gen(kSeed);
    std::size_t perfect = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto m = random_matrix(gen, draw(gen, 1, 200), draw(gen, 1, 60), true);
        std::vector<pm::PlacementLabel> pred;
        for (const auto& s : m.students()) pred.push_back(pm::forest::rule_baseline(s));
        perfect += pm::forest::evaluate(pred, m.labels()).accuracy == 1.0 ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    o.check(perfect == 1000, std::to_string(perfect) + "/1000 datasets at accuracy 1.0");
    o.check(secs < 10.0, "time " + fmt("%.2fs", secs));
    return o;
}

Outcome ctt_oracles() {
    Outcome o;
    std::mt19937_64 gen(kSeed);
    std::size_t mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const auto m = random_matrix(gen, draw(gen, 8, 50), draw(gen, 1, 10), false);
        const auto items = pm::ctt::analyze_items(m);
        for (std::size_t j = 0; j < m.item_count(); ++j) {
            const auto e = ctt_oracle(m, j);
            bool ok = items[j].difficulty == e.p && std::fabs(items[j].discrimination - e.d) <= 1e-12 &&
                      items[j].point_biserial.has_value() == e.r.has_value();
            if (ok && e.r) ok = std::fabs(*items[j].point_biserial - *e.r) <= 1e-12;
            mismatches += ok ? 0 : 1;
        }
    }
    o.check(mismatches == 0, std::to_string(mismatches) + " oracle mismatches over 200 instances");
    const auto dist = pm::ctt::quality_distribution(pm::appendix_a::kDiscrimination);
    const bool bands = dist.count(pm::ctt::Quality::Excellent) == 22 && dist.count(pm::ctt::Quality::Good) == 3 &&
                       dist.count(pm::ctt::Quality::Marginal) == 3 && dist.count(pm::ctt::Quality::Poor) == 12;
    o.check(bands, "bands {" + std::to_string(dist.counts[0]) + "," + std::to_string(dist.counts[1]) + "," +
                       std::to_string(dist.counts[2]) + "," + std::to_string(dist.counts[3]) + "}");
    return o;
}

Outcome forest_criteria() {
    Outcome o;
    std::mt19937_64 gen(kSeed);
    std::size_t split_mismatch = 0;
    for (int t = 0; t < 300; ++t) {
        pm::forest::Dataset d;
        d.rows = draw(gen, 1, 25);
        d.cols = draw(gen, 1, 8);
        for (std::size_t i = 0; i < d.rows * d.cols; ++i) d.x.push_back(static_cast<std::uint8_t>(draw(gen, 0, 1)));
        for (std::size_t i = 0; i < d.rows; ++i) d.y.push_back(static_cast<std::uint8_t>(draw(gen, 0, 2)));
        std::vector<std::size_t> samples;
        for (std::size_t i = 0; i < d.rows; ++i) samples.push_back(draw(gen, 0, d.rows - 1));
        std::vector<std::size_t> cand(d.cols);
        std::iota(cand.begin(), cand.end(), std::size_t{0});
        std::shuffle(cand.begin(), cand.end(), gen);
        cand.resize(draw(gen, 1, d.cols));
        const auto ours = pm::forest::best_split(d, samples, cand);
        const auto want = split_oracle(d, samples, cand);
        const bool ok = ours.has_value() == want.has_value() &&
                        (!ours || (ours->feature == want->first &&
                                   std::fabs(ours->gain - want->second.convert_to<double>()) <= 1e-12));
        split_mismatch += ok ? 0 : 1;
    }
    o.check(split_mismatch == 0, std::to_string(split_mismatch) + "/300 split mismatches");

    const auto data = pm::forest::Dataset::from(cohort());
    const auto one = pm::forest::rf_fit(data, {}, kSeed, 1);
    const auto eight = pm::forest::rf_fit(data, {}, kSeed, 8);
    const double mdi_sum = std::accumulate(one.mdi_importance.begin(), one.mdi_importance.end(), 0.0);
    o.check(std::fabs(mdi_sum - 1.0) <= 1e-9, "MDI sum-1=" + fmt("%.1e", mdi_sum - 1.0));
    o.check(one == eight && pm::io::to_json(one).dump() == pm::io::to_json(eight).dump(),
            std::string("1 vs 8 workers ") + (one == eight ? "identical" : "differ"));
    const auto cv = pm::forest::cross_validate(data, {}, 5, kSeed, 8);
    o.check(cv.mean >= 0.93, "CV mean=" + fmt("%.4f", cv.mean));
    const auto top = static_cast<std::size_t>(
        std::max_element(one.mdi_importance.begin(), one.mdi_importance.end()) - one.mdi_importance.begin());
    o.check(top == pm::appendix_a::kQ6Index, "MDI #1=Q" + std::to_string(top + 1));
    o.check(one.mdi_importance[pm::appendix_a::kQ6Index] >= 0.10,
            "Q6 share=" + fmt("%.3f", one.mdi_importance[pm::appendix_a::kQ6Index]));
    return o;
}

Outcome permutation_criteria() {
    Outcome o;
    const auto data = pm::forest::Dataset::from(cohort());
    pm::forest::Dataset wider;
    wider.rows = data.rows;
    wider.cols = data.cols + 1;
    wider.y = data.y;
    for (std::size_t r = 0; r < data.rows; ++r) {
        wider.x.insert(wider.x.end(), data.row(r).begin(), data.row(r).end());
        wider.x.push_back(0);
    }
    const auto with_const = pm::forest::rf_fit(wider, {}, kSeed, 8);
    const auto drops_const = pm::forest::permutation_importance(with_const, wider, kSeed, 10, 8);
    o.check(drops_const.back().mean_drop == 0.0, "constant drop=" + fmt("%.3g", drops_const.back().mean_drop));

    const auto model = pm::forest::rf_fit(data, {}, kSeed, 8);
    const auto drops = pm::forest::permutation_importance(model, data, kSeed, 10, 8);
    const double q6 = drops[pm::appendix_a::kQ6Index].mean_drop;
    o.check(q6 >= 0.08 && q6 <= 0.20, "Q6 drop=" + fmt("%.4f", q6));
    return o;
}

Outcome clustering_criteria() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t sil_bad = 0;
    std::size_t ari_bad = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = draw(gen, 3, 25);
        const std::size_t k = draw(gen, 2, std::min<std::size_t>(5, n));
        pm::cluster::PointSet p(n, draw(gen, 1, 4));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < p.dim(); ++d) p[i][d] = unit(gen);
        std::vector<std::size_t> a(n);
        std::vector<std::size_t> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = i < k ? i : draw(gen, 0, k - 1);
            b[i] = draw(gen, 0, 3);
        }
        std::shuffle(a.begin(), a.end(), gen);
        sil_bad += std::fabs(pm::cluster::silhouette(p, a).mean - silhouette_oracle(p, a, k)) <= 1e-12 ? 0 : 1;
        ari_bad += std::fabs(pm::cluster::adjusted_rand(a, b) - ari_oracle(a, b)) <= 1e-12 ? 0 : 1;
    }
    o.check(sil_bad == 0 && ari_bad == 0,
            "oracle mismatches silhouette " + std::to_string(sil_bad) + ", ARI " + std::to_string(ari_bad));

    pm::io::RunConfig config;
    config.seed = kSeed;
    const auto analysis = pm::io::analyze_clusters(cohort(), config, false);
    bool monotone = true;
    for (const auto& s : analysis.curve.solutions)
        for (std::size_t i = 1; i < s.wcss_trace.size(); ++i) monotone = monotone && s.wcss_trace[i] <= s.wcss_trace[i - 1];
    o.check(monotone, "WCSS traces non-increasing");
    const double s2 = *analysis.silhouette[0];
    bool k2_best = true;
    for (std::size_t i = 1; i < analysis.silhouette.size(); ++i) k2_best = k2_best && s2 > *analysis.silhouette[i];
    o.check(k2_best, "silhouette k=2 " + fmt("%.3f", s2) + " vs k=3 " + fmt("%.3f", *analysis.silhouette[1]));
    const auto profile = pm::cluster::cluster_profile(analysis.curve.solutions[0], cohort());
    o.check(profile.natural_boundary >= 40.0 && profile.natural_boundary <= 50.0,
            "boundary=" + fmt("%.1f%%", profile.natural_boundary));
    o.check(profile.clusters.front().purity == 1.0, "lower purity=" + fmt("%.3f", *profile.clusters.front().purity));
    const auto stability =
        pm::cluster::bootstrap_stability(analysis.points, analysis.curve.solutions[0], 100, kSeed, {}, 8);
    o.check(stability.mean_ari >= 0.80, "bootstrap ARI=" + fmt("%.3f", stability.mean_ari));
    const double secs = seconds_since(t0);
    o.check(secs < 60.0, "time " + fmt("%.1fs", secs));
    return o;
}

Outcome stratified_folds() {
    Outcome o;
    std::vector<pm::PlacementLabel> labels;
    labels.insert(labels.end(), 118, pm::PlacementLabel::CollegeAlgebra);
    labels.insert(labels.end(), 59, pm::PlacementLabel::Precalculus);
    labels.insert(labels.end(), 21, pm::PlacementLabel::CalculusI);
    const auto folds = pm::forest::stratified_kfold(labels, 5, kSeed);
    std::vector<std::size_t> sizes;
    std::vector<int> seen(198, 0);
    for (const auto& f : folds) {
        sizes.push_back(f.size());
        for (auto i : f) ++seen[i];
    }
    std::sort(sizes.rbegin(), sizes.rend());
    o.check(sizes == std::vector<std::size_t>{40, 40, 40, 39, 39}, "sizes {40,40,40,39,39}");
    o.check(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }), "partition");
    bool balanced = true;
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<std::size_t> per;
        for (const auto& f : folds)
            per.push_back(static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [&](auto i) { return pm::rank(labels[i]) == k; })));
        balanced = balanced && *std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1;
    }
    o.check(balanced, "per-class counts within 1");
    return o;
}

Outcome method_agreement() {
    Outcome o;
    const auto items = pm::io::analyze(cohort());
    const auto model = pm::forest::rf_fit(cohort(), {}, kSeed, 8);
    const auto table = pm::io::agreement(items, model);
    const double d_r = *table.at("D", "r_pbis");
    const double mdi_f = *table.at("rf_importance", "F");
    o.check(d_r >= 0.80, "corr(D,r_pbis)=" + fmt("%.3f", d_r));
    o.check(mdi_f >= 0.75, "corr(MDI,F)=" + fmt("%.3f", mdi_f));
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto dir = fs::temp_directory_path() / "placemetrics_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = PLACEMETRICS_CLI;
    auto sh = [](const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); };
    const bool made = sh(cli + " simulate --reconstructed --output-dir " + (dir / "sim").string()) == 0;
    const std::string args = " report --emit-plots --input " + (dir / "sim" / "cohort.csv").string();
    const bool ran = made && sh(cli + args + " --output-dir " + (dir / "a").string()) == 0 &&
                     sh(cli + args + " --workers 4 --output-dir " + (dir / "b").string()) == 0;
    o.check(ran, "two report runs");
    if (ran) {
        std::size_t compared = 0;
        bool same = true;
        for (const auto& entry : fs::directory_iterator(dir / "a")) {
            ++compared;
            same = same && pm::io::read_file(entry.path()) == pm::io::read_file(dir / "b" / entry.path().filename());
        }
        o.check(same && compared >= 2, std::to_string(compared) + " artifacts byte-identical");
    }
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "Q6 ANOVA", signature_anova},
        {2, "Q6 mutual information", signature_mi},
        {3, "rule baseline", rule_baseline},
        {4, "CTT oracles and quality bands", ctt_oracles},
        {5, "forest", forest_criteria},
        {6, "permutation importance", permutation_criteria},
        {7, "clustering", clustering_criteria},
        {8, "stratified CV", stratified_folds},
        {9, "method agreement", method_agreement},
        {10, "end-to-end determinism", determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
