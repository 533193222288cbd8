// placemetrics: command-line front end for the placement-exam analysis pipeline.
//
// Every subcommand writes JSON into --output-dir. Failures write error.json
// there instead and exit nonzero.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>

#include <CLI11.hpp>

#include <placemetrics/appendix_a.hpp>
#include <placemetrics/ctt.hpp>
#include <placemetrics/error.hpp>
#include <placemetrics/io/csv.hpp>
#include <placemetrics/io/report.hpp>
#include <placemetrics/io/serialize.hpp>
#include <placemetrics/synth.hpp>

namespace fs = std::filesystem;
namespace pm = placemetrics;
using pm::io::Json;

namespace {

struct Options {
    pm::io::RunConfig config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> mtry;
    bool appendix_a = false;
    bool reconstructed = false;
    std::size_t students = pm::appendix_a::kStudents;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    const char* env = std::getenv("PLACEMETRICS_SEED");
    if (env == nullptr || *env == '\0') {
        return pm::io::kDefaultSeed;
    }
    const std::string text(env);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw pm::Error(pm::ErrorKind::Config, "PLACEMETRICS_SEED is not an unsigned integer: '" + text + "'");
    }
    return value;
}

struct Input {
    pm::ResponseMatrix matrix;
    Json provenance;
};

Input load_input(const pm::io::RunConfig& config) {
    if (config.input.empty()) {
        throw pm::Error(pm::ErrorKind::Config, "--input is required");
    }
    const std::string bytes = pm::io::read_file(config.input);
    std::istringstream stream(bytes);
    auto loaded = pm::io::parse_csv(stream, config.item_count);
    for (const auto& w : loaded.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return {std::move(loaded.matrix),
            pm::io::provenance_json(config.seed, bytes, config.input.filename().string())};
}

void emit(const pm::io::RunConfig& config, const std::string& name, Json body, const Json& provenance) {
    body["provenance"] = provenance;
    pm::io::write_json(config.output_dir / name, body);
}

void run_simulate(const Options& opts) {
    const auto& config = opts.config;
    if (opts.appendix_a == opts.reconstructed) {
        throw pm::Error(pm::ErrorKind::Config, "simulate needs exactly one of --appendix-a or --reconstructed");
    }
    const auto items = pm::synth::calibrate_to_appendix(config.seed);
    pm::synth::SimulatedCohort cohort = opts.reconstructed
                                            ? pm::synth::reconstructed_cohort(config.seed)
                                            : pm::synth::simulate_2pl(items, opts.students, config.seed);
    const std::string csv = pm::io::to_csv(cohort.matrix);
    pm::io::write_text(config.output_dir / "cohort.csv", csv);

    const auto achieved = pm::ctt::analyze_items(cohort.matrix);
    Json rows = Json::array();
    double worst = 0.0;
    for (std::size_t j = 0; j < items.size(); ++j) {
        const double gap = std::fabs(achieved[j].difficulty - pm::appendix_a::kDifficulty[j]);
        worst = std::max(worst, gap);
        rows.push_back(Json{{"item", pm::io::item_name(j)},
                            {"a", pm::io::number(items[j].a)},
                            {"b", pm::io::number(items[j].b)},
                            {"target_difficulty", pm::appendix_a::kDifficulty[j]},
                            {"target_discrimination", pm::appendix_a::kDiscrimination[j]},
                            {"difficulty", pm::io::number(achieved[j].difficulty)},
                            {"discrimination", pm::io::number(achieved[j].discrimination)}});
    }
    Json body{{"mode", opts.reconstructed ? "reconstructed" : "appendix_a"},
              {"students", cohort.matrix.student_count()},
              {"label_counts", pm::io::label_counts_json(cohort.matrix.label_counts())},
              {"items", rows},
              {"max_abs_difficulty_error", pm::io::number(worst)}};
    emit(config, "simulate.json", body, pm::io::provenance_json(config.seed, csv, "cohort.csv"));
}

void run(const std::string& command, const Options& opts) {
    const auto& config = opts.config;
    if (command == "simulate") {
        run_simulate(opts);
        return;
    }
    const auto input = load_input(config);
    const auto& matrix = input.matrix;
    const auto& prov = input.provenance;

    if (command == "describe") {
        emit(config, "describe.json", Json{{"descriptive", pm::io::describe_section(matrix)}}, prov);
        if (config.emit_plots) {
            pm::io::write_score_histogram(config.output_dir, matrix);
        }
        return;
    }
    if (command == "ctt") {
        const auto analysis = pm::io::analyze(matrix);
        emit(config, "ctt.json", pm::io::ctt_section(analysis), prov);
        if (config.emit_plots) {
            pm::io::write_difficulty_discrimination(config.output_dir, analysis);
        }
        return;
    }

    matrix.require_labels();
    const auto data = pm::forest::Dataset::from(matrix);
    if (command == "features") {
        emit(config, "features.json", pm::io::features_section(pm::io::analyze(matrix)), prov);
        return;
    }
    if (command == "train") {
        const auto model = pm::io::train_model(matrix, config);
        pm::io::write_json(config.output_dir / "model.json", pm::io::to_json(model));
        emit(config, "train.json", pm::io::train_section(model, pm::io::training_metrics(model, data)), prov);
        return;
    }
    if (command == "cv") {
        const auto forest_cv = pm::forest::cross_validate(data, config.rf, config.folds, config.seed, config.workers);
        const auto baseline_cv = pm::forest::cross_validate_baseline(data, config.folds, config.seed);
        emit(config, "cv.json", pm::io::cv_section(forest_cv, baseline_cv, config.folds), prov);
        return;
    }
    if (command == "importance") {
        const auto analysis = pm::io::analyze(matrix);
        const auto model = pm::io::train_model(matrix, config);
        const auto permutation =
            pm::forest::permutation_importance(model, data, config.seed, config.permutation_repeats, config.workers);
        emit(config, "importance.json", pm::io::importance_section(analysis, model, permutation), prov);
        if (config.emit_plots) {
            pm::io::write_feature_importance(config.output_dir, analysis, model, permutation);
        }
        return;
    }
    if (command == "cluster") {
        const auto clusters = pm::io::analyze_clusters(matrix, config);
        emit(config, "cluster.json", pm::io::cluster_section(clusters), prov);
        if (config.emit_plots) {
            pm::io::write_cluster_plots(config.output_dir, matrix, clusters);
        }
        return;
    }
    if (command == "stability") {
        const auto clusters = pm::io::analyze_clusters(matrix, config, false);
        emit(config, "stability.json", pm::io::stability_section(clusters, config), prov);
        return;
    }
    if (command == "report") {
        const auto report = pm::io::build_report(matrix, config, prov);
        pm::io::write_json(config.output_dir / "report.json", report.json);
        if (config.emit_plots) {
            pm::io::write_report_plots(config.output_dir, matrix, report);
        }
        return;
    }
    throw pm::Error(pm::ErrorKind::Config, "unknown subcommand " + command);
}

void write_error(const fs::path& dir, const std::string& kind, const std::string& message) {
    std::cerr << "error (" << kind << "): " << message << '\n';
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "error.json", std::ios::binary);
    if (out) {
        out << Json{{"error", Json{{"kind", kind}, {"message", message}}}}.dump(2) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    Options opts;
    auto& config = opts.config;
    std::size_t max_depth = config.rf.max_depth;

    CLI::App app{"Item analysis, placement classification and competency clustering for binary exam data",
                 "placemetrics"};
    app.set_version_flag("--version", pm::io::kToolkitVersion);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--input", config.input, "response-matrix CSV");
    app.add_option("--output-dir", config.output_dir, "directory for JSON and TSV artifacts");
    app.add_option("--seed", opts.seed, "master seed (falls back to PLACEMETRICS_SEED, then 42)");
    app.add_option("--items", config.item_count, "expected item count; the CSV must agree");
    app.add_option("--folds", config.folds, "cross-validation folds");
    app.add_option("--k-min", config.k_min, "smallest k for clustering");
    app.add_option("--k-max", config.k_max, "largest k for clustering");
    app.add_option("--bootstrap-iters", config.bootstrap_iters, "bootstrap iterations for stability");
    app.add_option("--trees", config.rf.n_estimators, "number of trees");
    app.add_option("--max-depth", max_depth, "maximum tree depth");
    app.add_option("--min-split", config.rf.min_samples_split, "minimum samples to split a node");
    app.add_option("--mtry", opts.mtry, "features tried per split (default ceil(sqrt(m)))");
    app.add_option("--permutation-repeats", config.permutation_repeats, "shuffles per feature");
    app.add_option("--gap-refs", config.gap_references, "reference datasets for the gap statistic");
    app.add_option("--workers", config.workers, "worker threads; results do not depend on this");
    app.add_flag("--emit-plots", config.emit_plots, "also write TSV plot data");

    const char* commands[][2] = {
        {"describe", "descriptive statistics of percent scores"},
        {"ctt", "difficulty, discrimination, point-biserial and quality bands"},
        {"features", "ANOVA F and mutual information per item"},
        {"train", "fit the random forest; writes model.json"},
        {"cv", "stratified cross-validation of the forest and the cut-score rule"},
        {"importance", "MDI, permutation and statistical importances with agreement table"},
        {"cluster", "k-means over the k range with WCSS, silhouette and gap"},
        {"stability", "bootstrap ARI stability per k"},
        {"simulate", "generate a synthetic cohort CSV"},
        {"report", "run every analysis into report.json"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        if (std::string(name) == "simulate") {
            sub->add_flag("--appendix-a", opts.appendix_a, "2PL cohort calibrated to the reference item table");
            sub->add_flag("--reconstructed", opts.reconstructed, "quota cohort with 118/59/21 labels");
            sub->add_option("--students", opts.students, "cohort size for --appendix-a");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        write_error(config.output_dir, "config", e.what());
        return 2;
    }

    std::error_code ec;
    fs::remove(config.output_dir / "error.json", ec);
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        config.seed = resolve_seed(opts.seed);
        config.rf.max_depth = max_depth;
        config.rf.mtry = opts.mtry;
        config.validate();
        if (opts.students < 1) {
            throw pm::Error(pm::ErrorKind::Config, "--students must be at least 1");
        }
        fs::create_directories(config.output_dir);
        run(command, opts);
    } catch (const pm::Error& e) {
        write_error(config.output_dir, std::string(pm::to_string(e.kind())), e.what());
        return e.kind() == pm::ErrorKind::Config ? 2 : 1;
    } catch (const std::exception& e) {
        write_error(config.output_dir, "internal", e.what());
        return 1;
    }
    return 0;
}
