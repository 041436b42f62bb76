// Command-line front end: simulated data generation, classifier training and
// scoring, calibrator fitting, evaluation, the full experiment pipeline, and
// model inspection. File formats are documented in the README.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bincal/baseline_calibrators.hpp"
#include "bincal/binning_calibrators.hpp"
#include "bincal/classifiers.hpp"
#include "bincal/csv.hpp"
#include "bincal/datagen.hpp"
#include "bincal/error.hpp"
#include "bincal/experiment.hpp"
#include "bincal/metrics.hpp"
#include "bincal/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenOptions {
    std::string pattern = "xor";
    std::size_t n_train = 600, n_calib = 600, n_test = 600;
    std::uint64_t seed = 0;
    double noise = 0.0;
    std::string out_dir;
};

int run_gen(const GenOptions& opt) {
    bincal::SimSpec spec;
    spec.pattern = bincal::pattern_from_name(opt.pattern);
    spec.n_train = opt.n_train;
    spec.n_calib = opt.n_calib;
    spec.n_test = opt.n_test;
    spec.seed = opt.seed;
    spec.noise = opt.noise;
    const bincal::SimData data = bincal::generate(spec);

    fs::create_directories(opt.out_dir);
    const std::vector<std::string> names = {"x1", "x2"};
    bincal::write_dataset_csv(fs::path(opt.out_dir) / "train.csv", data.train, names);
    bincal::write_dataset_csv(fs::path(opt.out_dir) / "calib.csv", data.calib, names);
    bincal::write_dataset_csv(fs::path(opt.out_dir) / "test.csv", data.test, names);

    bincal::CsvSchema schema;
    schema.label = "label";
    schema.continuous = names;
    std::ofstream schema_out(fs::path(opt.out_dir) / "schema.json");
    schema_out << schema.to_json().dump(2) << '\n';

    std::cout << "wrote " << opt.pattern << " splits (" << opt.n_train << "/" << opt.n_calib
              << "/" << opt.n_test << ", seed " << opt.seed << ") to " << opt.out_dir << '\n';
    return 0;
}

struct TrainOptions {
    std::string train_csv, schema_path;
    std::string classifier = "lr";
    bincal::LrHyper hyper;
    std::vector<std::string> score_in, score_out;
};

int run_train(const TrainOptions& opt) {
    if (opt.score_in.size() != opt.score_out.size())
        throw bincal::errors::invalid_spec("--score and --scores-out counts must match");

    const bincal::CsvSchema schema = bincal::CsvSchema::from_file(opt.schema_path);
    bincal::CategoryDictionary dict;
    auto train_in = bincal::ingest_csv(opt.train_csv, schema, dict);
    if (train_in.dropped_rows > 0)
        std::cerr << "dropped " << train_in.dropped_rows << " rows with missing values from "
                  << opt.train_csv << '\n';

    std::function<double(const bincal::FeatureVector&)> score;
    if (opt.classifier == "lr") {
        auto encoder = bincal::OneHotEncoder::fit(train_in.data);
        auto standardizer = bincal::Standardizer::fit(encoder.encode(train_in.data));
        auto model = bincal::train_lr(standardizer.apply(encoder.encode(train_in.data)),
                                      train_in.data.labels, opt.hyper);
        score = [encoder, standardizer, model](const bincal::FeatureVector& fv) {
            return model.predict(standardizer.apply(encoder.encode(fv)));
        };
    } else if (opt.classifier == "nb") {
        auto model = bincal::train_nb(train_in.data);
        score = [model](const bincal::FeatureVector& fv) { return model.predict(fv); };
    } else {
        throw bincal::errors::invalid_spec("unknown classifier '" + opt.classifier + "'");
    }

    for (std::size_t k = 0; k < opt.score_in.size(); ++k) {
        auto part = bincal::ingest_csv(opt.score_in[k], schema, dict);
        if (part.dropped_rows > 0)
            std::cerr << "dropped " << part.dropped_rows << " rows with missing values from "
                      << opt.score_in[k] << '\n';
        std::vector<bincal::ScoredInstance> scored;
        scored.reserve(part.data.size());
        for (std::size_t i = 0; i < part.data.size(); ++i)
            scored.push_back({score(part.data.rows[i]), part.data.labels[i]});
        bincal::write_scores_csv(opt.score_out[k], scored);
        std::cout << "scored " << scored.size() << " rows -> " << opt.score_out[k] << '\n';
    }
    return 0;
}

struct CalibrateOptions {
    std::string scores_path, out_path;
    std::string method = "sbb";
    double lambda = 0.0, gamma_cap = 0.99, gamma = 0.0;
    std::size_t cells = 100, bins = 10;
    bool exact = false, no_smoothing = false;
};

int run_calibrate(const CalibrateOptions& opt) {
    bincal::CalibratorSpec spec;
    spec.method = opt.method;
    spec.prior.lambda = opt.lambda;
    spec.prior.gamma_cap = opt.gamma_cap;
    spec.prior.gamma_override = opt.gamma;
    spec.hist_bins = opt.bins;
    spec.abb_cells = opt.exact ? 0 : opt.cells;
    spec.platt_smoothing = !opt.no_smoothing;

    const auto scores = bincal::read_scores_csv(opt.scores_path);
    const auto set = bincal::sort_and_validate(scores);
    const bincal::CalibrationMap model = bincal::fit_calibrator(spec, set);

    if (const auto* platt = std::get_if<bincal::PlattModel>(&model); platt && !platt->converged)
        std::cerr << "warning: sigmoid fit stopped before convergence (gradient norm "
                  << platt->gradient_norm << ")\n";

    bincal::save_model(model, opt.out_path);
    std::cout << "fitted " << bincal::model_kind(model) << " on " << set.size()
              << " instances -> " << opt.out_path << '\n';
    return 0;
}

struct EvalOptions {
    std::string scores_path, out_dir;
    std::vector<std::string> model_paths;
    std::string dataset_name = "scores", classifier_name = "external";
    double threshold = 0.5;
};

int run_eval(const EvalOptions& opt) {
    const auto test_scores = bincal::read_scores_csv(opt.scores_path);

    std::vector<std::pair<std::string, bincal::EvalReport>> reports;
    reports.emplace_back("raw", bincal::evaluate(test_scores, opt.threshold));
    for (const auto& path : opt.model_paths) {
        const bincal::CalibrationMap model = bincal::load_model(path);
        std::vector<bincal::ScoredInstance> mapped;
        mapped.reserve(test_scores.size());
        for (const auto& pr : test_scores)
            mapped.push_back({bincal::calibrate(model, pr.score), pr.label});
        reports.emplace_back(bincal::model_kind(model), bincal::evaluate(mapped, opt.threshold));
    }
    const bincal::ResultsTable table =
        bincal::build_results_table(opt.dataset_name, opt.classifier_name, reports);

    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        std::ofstream csv_out(fs::path(opt.out_dir) / "results.csv");
        bincal::write_results_csv(csv_out, table);
        std::ofstream json_out(fs::path(opt.out_dir) / "results.json");
        json_out << bincal::results_to_json(table).dump(2) << '\n';
        for (const auto& [method, report] : reports) {
            std::ofstream rel(fs::path(opt.out_dir) / ("reliability_" + method + ".csv"));
            bincal::write_reliability_csv(rel, report.reliability);
        }
    }
    bincal::write_results_csv(std::cout, table);
    return 0;
}

struct RunOptions {
    std::string config_path;
    std::string pattern;
    std::size_t n_train = 600, n_calib = 600, n_test = 600;
    std::uint64_t seed = 0;
    double noise = 0.0;
    std::string train_csv, calib_csv, test_csv, schema_path;
    bool share_train_calib = false;
    std::string classifier = "lr";
    bincal::LrHyper hyper;
    std::string methods = "platt,hist,isoreg,sbb,abb";
    double lambda = 0.0, gamma_cap = 0.99, gamma = 0.0;
    std::size_t cells = 100, bins = 10;
    bool exact = false, no_smoothing = false;
    double threshold = 0.5;
    std::string dataset_name, out_dir = "results";
};

int run_run(const RunOptions& opt) {
    bincal::ExperimentConfig cfg;
    if (!opt.pattern.empty()) {
        bincal::SimSpec spec;
        spec.pattern = bincal::pattern_from_name(opt.pattern);
        spec.n_train = opt.n_train;
        spec.n_calib = opt.n_calib;
        spec.n_test = opt.n_test;
        spec.seed = opt.seed;
        spec.noise = opt.noise;
        cfg.sim = spec;
    }
    if (!opt.train_csv.empty()) {
        bincal::CsvSource src;
        src.train = opt.train_csv;
        src.calib = opt.calib_csv.empty() ? opt.train_csv : opt.calib_csv;
        src.test = opt.test_csv;
        src.schema = opt.schema_path;
        cfg.csv = src;
    }
    cfg.share_train_calib = opt.share_train_calib;
    cfg.dataset_name = opt.dataset_name;
    cfg.classifier = opt.classifier;
    cfg.lr_hyper = opt.hyper;
    cfg.accuracy_threshold = opt.threshold;
    cfg.out_dir = opt.out_dir;

    cfg.calibrators.clear();
    std::stringstream ss(opt.methods);
    std::string method;
    while (std::getline(ss, method, ',')) {
        if (method.empty())
            continue;
        bincal::CalibratorSpec spec;
        spec.method = method;
        spec.prior.lambda = opt.lambda;
        spec.prior.gamma_cap = opt.gamma_cap;
        spec.prior.gamma_override = opt.gamma;
        spec.hist_bins = opt.bins;
        spec.abb_cells = opt.exact ? 0 : opt.cells;
        spec.platt_smoothing = !opt.no_smoothing;
        cfg.calibrators.push_back(spec);
    }

    // config file wins over flags
    if (!opt.config_path.empty()) {
        if (!fs::exists(opt.config_path))
            throw bincal::errors::file_not_found(opt.config_path);
        std::ifstream in(opt.config_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw bincal::errors::invalid_spec(std::string("bad config file: ") + e.what());
        }
        bincal::apply_config_json(cfg, j);
    }

    const bincal::ExperimentResult result = bincal::run_experiment(cfg);
    if (result.dropped_rows > 0)
        std::cerr << "dropped " << result.dropped_rows << " rows with missing values\n";
    bincal::write_results_csv(std::cout, result.table);
    if (!cfg.out_dir.empty())
        std::cout << "results written to " << cfg.out_dir.string() << '\n';
    return 0;
}

struct InspectOptions {
    std::string model_path;
    std::size_t grid = 0;
};

int run_inspect(const InspectOptions& opt) {
    const bincal::CalibrationMap model = bincal::load_model(opt.model_path);
    std::cout << "kind: " << bincal::model_kind(model) << '\n';

    struct Printer {
        void operator()(const bincal::SbbModel& m) const {
            std::printf("n: %zu\nlambda: %.6g\ngamma: %.6g\nlog_score: %.6f\nbins: %zu\n",
                        m.n, m.lambda, m.gamma, m.log_score.value, m.binning.bins.size());
            for (std::size_t i = 0; i < m.binning.bins.size(); ++i) {
                const auto& bin = m.binning.bins[i];
                std::printf("  [%g, %g) items %zu..%zu n0=%zu n1=%zu estimate %.6f\n",
                            bin.left_edge, bin.right_edge, bin.begin, bin.end, bin.n0, bin.n1,
                            m.estimates[i]);
            }
        }
        void operator()(const bincal::AbbModel& m) const {
            std::printf("n: %zu\nlambda: %.6g\ngamma: %.6g\ntotal_log_mass: %.6f\n",
                        m.set.size(), m.lambda, m.gamma, m.total_log_mass());
        }
        void operator()(const bincal::CachedAbbModel& m) const {
            double lo = 1.0, hi = 0.0;
            for (double v : m.values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            std::printf("n: %zu\nlambda: %.6g\ngamma: %.6g\ncells: %zu\nvalue range: [%.6f, %.6f]\n",
                        m.n, m.lambda, m.gamma, m.cells, lo, hi);
        }
        void operator()(const bincal::HistogramModel& m) const {
            std::printf("n: %zu\nrequested_bins: %zu\nbins: %zu\n", m.n, m.requested_bins,
                        m.binning.bins.size());
            for (std::size_t i = 0; i < m.binning.bins.size(); ++i) {
                const auto& bin = m.binning.bins[i];
                std::printf("  [%g, %g) count %zu estimate %.6f\n", bin.left_edge,
                            bin.right_edge, bin.count(), m.estimates[i]);
            }
        }
        void operator()(const bincal::PlattModel& m) const {
            std::printf("slope: %.8g\noffset: %.8g\nsmoothed_targets: %s\nconverged: %s\n"
                        "gradient_norm: %.3g\niterations: %zu\n",
                        m.slope, m.offset, m.smoothed_targets ? "true" : "false",
                        m.converged ? "true" : "false", m.gradient_norm, m.iterations);
        }
        void operator()(const bincal::IsotonicModel& m) const {
            std::printf("blocks: %zu\n", m.values.size());
            for (std::size_t i = 0; i < m.values.size(); ++i)
                std::printf("  from %.6g -> %.6f\n", m.thresholds[i], m.values[i]);
        }
    };
    std::visit(Printer{}, model);

    if (opt.grid > 0) {
        std::printf("grid:\n");
        for (std::size_t i = 0; i <= opt.grid; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(opt.grid);
            std::printf("  %.6f -> %.8f\n", x, bincal::calibrate(model, x));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary classifier probability calibration toolkit"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate simulated dataset splits");
    gen_cmd->add_option("--pattern", gen.pattern, "linear | xor | circular")->required();
    gen_cmd->add_option("--n-train", gen.n_train);
    gen_cmd->add_option("--n-calib", gen.n_calib);
    gen_cmd->add_option("--n-test", gen.n_test);
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--noise", gen.noise, "label flip probability");
    gen_cmd->add_option("--out-dir", gen.out_dir)->required();

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "train a base classifier and score datasets");
    train_cmd->add_option("--train", train.train_csv)->required();
    train_cmd->add_option("--schema", train.schema_path)->required();
    train_cmd->add_option("--classifier", train.classifier, "lr | nb");
    train_cmd->add_option("--learning-rate", train.hyper.learning_rate);
    train_cmd->add_option("--epochs", train.hyper.epochs);
    train_cmd->add_option("--l2", train.hyper.l2);
    train_cmd->add_option("--score", train.score_in, "dataset csv to score (repeatable)");
    train_cmd->add_option("--scores-out", train.score_out, "output scores csv (repeatable)");

    CalibrateOptions cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "fit a calibrator on a scores csv");
    cal_cmd->add_option("--scores", cal.scores_path)->required();
    cal_cmd->add_option("--method", cal.method, "platt | hist | isoreg | sbb | abb")->required();
    cal_cmd->add_option("--out", cal.out_path)->required();
    cal_cmd->add_option("--lambda", cal.lambda, "expected boundary count (0 = sqrt(N))");
    cal_cmd->add_option("--gamma-cap", cal.gamma_cap);
    cal_cmd->add_option("--gamma", cal.gamma, "force this per-gap boundary probability");
    cal_cmd->add_option("--cells", cal.cells, "cache cells for abb");
    cal_cmd->add_flag("--exact", cal.exact, "store the exact averaging model instead of a cache");
    cal_cmd->add_option("--bins", cal.bins, "bin count for hist");
    cal_cmd->add_flag("--no-smoothing", cal.no_smoothing, "disable sigmoid target smoothing");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate raw and calibrated scores");
    eval_cmd->add_option("--scores", eval.scores_path)->required();
    eval_cmd->add_option("--model", eval.model_paths, "fitted model json (repeatable)");
    eval_cmd->add_option("--out-dir", eval.out_dir);
    eval_cmd->add_option("--dataset-name", eval.dataset_name);
    eval_cmd->add_option("--classifier-name", eval.classifier_name);
    eval_cmd->add_option("--threshold", eval.threshold, "accuracy threshold");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "full pipeline: data, train, calibrate, evaluate");
    run_cmd->add_option("--config", run.config_path, "json config (overrides flags)");
    run_cmd->add_option("--pattern", run.pattern, "simulated data: linear | xor | circular");
    run_cmd->add_option("--n-train", run.n_train);
    run_cmd->add_option("--n-calib", run.n_calib);
    run_cmd->add_option("--n-test", run.n_test);
    run_cmd->add_option("--seed", run.seed);
    run_cmd->add_option("--noise", run.noise);
    run_cmd->add_option("--train", run.train_csv, "csv data: train split");
    run_cmd->add_option("--calib", run.calib_csv);
    run_cmd->add_option("--test", run.test_csv);
    run_cmd->add_option("--schema", run.schema_path);
    run_cmd->add_flag("--share-train-calib", run.share_train_calib,
                      "calibrate on the training split");
    run_cmd->add_option("--classifier", run.classifier, "lr | nb");
    run_cmd->add_option("--learning-rate", run.hyper.learning_rate);
    run_cmd->add_option("--epochs", run.hyper.epochs);
    run_cmd->add_option("--l2", run.hyper.l2);
    run_cmd->add_option("--methods", run.methods, "comma list of calibrators");
    run_cmd->add_option("--lambda", run.lambda);
    run_cmd->add_option("--gamma-cap", run.gamma_cap);
    run_cmd->add_option("--gamma", run.gamma);
    run_cmd->add_option("--cells", run.cells);
    run_cmd->add_flag("--exact", run.exact, "exact averaging instead of the cache");
    run_cmd->add_option("--bins", run.bins);
    run_cmd->add_flag("--no-smoothing", run.no_smoothing);
    run_cmd->add_option("--threshold", run.threshold);
    run_cmd->add_option("--dataset-name", run.dataset_name);
    run_cmd->add_option("--out-dir", run.out_dir);

    InspectOptions inspect;
    auto* inspect_cmd = app.add_subcommand("inspect-model", "print a fitted model summary");
    inspect_cmd->add_option("model", inspect.model_path)->required();
    inspect_cmd->add_option("--grid", inspect.grid, "also print this many grid samples");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (train_cmd->parsed()) return run_train(train);
        if (cal_cmd->parsed()) return run_calibrate(cal);
        if (eval_cmd->parsed()) return run_eval(eval);
        if (run_cmd->parsed()) return run_run(run);
        if (inspect_cmd->parsed()) return run_inspect(inspect);
    } catch (const bincal::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
