#pragma once

// The experiment runner: train a base classifier on the train split, fit the
// requested calibrators on the scored calibration split, evaluate raw and
// calibrated predictions on the test split, and emit machine-readable result
// tables plus per-method reliability rows. Errors are tagged with the
// pipeline stage they came from.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bincal/baseline_calibrators.hpp"
#include "bincal/binning_calibrators.hpp"
#include "bincal/classifiers.hpp"
#include "bincal/csv.hpp"
#include "bincal/datagen.hpp"
#include "bincal/dataset.hpp"
#include "bincal/error.hpp"
#include "bincal/metrics.hpp"
#include "bincal/model_io.hpp"

namespace bincal {

struct CalibratorSpec {
    std::string method; // platt | hist | isoreg | sbb | abb
    BinningPriorConfig prior;
    std::size_t hist_bins = 10;
    std::size_t abb_cells = 100; // 0 = exact averaging per query
    bool platt_smoothing = true;
};

inline std::vector<CalibratorSpec> default_calibrators() {
    return {{"platt", {}, 10, 100, true},
            {"hist", {}, 10, 100, true},
            {"isoreg", {}, 10, 100, true},
            {"sbb", {}, 10, 100, true},
            {"abb", {}, 10, 100, true}};
}

struct CsvSource {
    std::filesystem::path train;
    std::filesystem::path calib;
    std::filesystem::path test;
    std::filesystem::path schema;
};

struct ExperimentConfig {
    std::optional<SimSpec> sim;
    std::optional<CsvSource> csv;
    bool share_train_calib = false;
    std::string dataset_name;
    std::string classifier = "lr"; // lr | nb
    LrHyper lr_hyper;
    std::vector<CalibratorSpec> calibrators = default_calibrators();
    double accuracy_threshold = 0.5;
    std::filesystem::path out_dir; // empty = no files written
};

struct ResultsTable {
    std::string dataset;
    std::string classifier;
    std::vector<std::string> methods;                           // column order, raw first
    std::map<std::string, std::map<std::string, double>> values; // measure -> method -> value
    std::map<std::string, std::map<std::string, int>> ranks;

    double value(const std::string& measure, const std::string& method) const {
        return values.at(measure).at(method);
    }
    int rank(const std::string& measure, const std::string& method) const {
        return ranks.at(measure).at(method);
    }
};

struct ExperimentResult {
    ResultsTable table;
    std::vector<std::pair<std::string, EvalReport>> reports; // method order as in table
    std::vector<std::pair<std::string, CalibrationMap>> models;
    std::size_t dropped_rows = 0;
};

namespace detail {

inline const std::vector<std::string>& measure_names() {
    static const std::vector<std::string> names = {"acc", "auc", "rmse", "ece", "mce"};
    return names;
}

inline bool higher_is_better(const std::string& measure) {
    return measure == "acc" || measure == "auc";
}

template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), "[" + stage + "] " + e.what());
    }
}

} // namespace detail

inline CalibrationMap fit_calibrator(const CalibratorSpec& spec,
                                     const SortedCalibrationSet& set) {
    if (spec.method == "platt")
        return fit_platt(set, {spec.platt_smoothing});
    if (spec.method == "hist")
        return fit_histogram(set, spec.hist_bins);
    if (spec.method == "isoreg")
        return fit_isotonic(set);
    if (spec.method == "sbb")
        return fit_sbb(set, spec.prior);
    if (spec.method == "abb") {
        if (spec.abb_cells == 0)
            return fit_abb(set, spec.prior);
        return fit_abb_cached(set, spec.prior, spec.abb_cells);
    }
    throw errors::invalid_spec("unknown calibrator '" + spec.method + "'");
}

// Table assembly shared by the runner and the standalone evaluation path:
// one value per (measure, method) plus the paper-style rank column (1 = best,
// ties share the better rank; a rank of 1 or 2 is what the tables bold).
inline ResultsTable build_results_table(
    const std::string& dataset, const std::string& classifier,
    const std::vector<std::pair<std::string, EvalReport>>& reports) {
    ResultsTable table;
    table.dataset = dataset;
    table.classifier = classifier;
    for (const auto& [method, report] : reports) {
        table.methods.push_back(method);
        table.values["acc"][method] = report.acc;
        table.values["auc"][method] = report.auc;
        table.values["rmse"][method] = report.rmse;
        table.values["ece"][method] = report.ece;
        table.values["mce"][method] = report.mce;
    }
    for (const auto& measure : detail::measure_names()) {
        const bool higher = detail::higher_is_better(measure);
        for (const auto& method : table.methods) {
            const double mine = table.values[measure][method];
            int better = 0;
            for (const auto& other : table.methods) {
                const double theirs = table.values[measure][other];
                if (higher ? theirs > mine : theirs < mine)
                    ++better;
            }
            table.ranks[measure][method] = better + 1;
        }
    }
    return table;
}

inline void write_results_csv(std::ostream& os, const ResultsTable& table) {
    os << "dataset,classifier,method,measure,value,rank\n";
    char buf[64];
    for (const auto& measure : detail::measure_names()) {
        for (const auto& method : table.methods) {
            std::snprintf(buf, sizeof(buf), "%.12g", table.value(measure, method));
            os << table.dataset << ',' << table.classifier << ',' << method << ',' << measure
               << ',' << buf << ',' << table.rank(measure, method) << '\n';
        }
    }
}

inline nlohmann::json results_to_json(const ResultsTable& table) {
    nlohmann::json j;
    j["dataset"] = table.dataset;
    j["classifier"] = table.classifier;
    j["methods"] = table.methods;
    j["measures"] = detail::measure_names();
    j["values"] = table.values;
    j["ranks"] = table.ranks;
    return j;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    using detail::with_stage;

    // datasets
    LabeledDataset train, calib, test;
    std::size_t dropped = 0;
    with_stage("data", [&] {
        if (cfg.sim && cfg.csv)
            throw errors::invalid_spec("configure either simulated or CSV data, not both");
        if (cfg.sim) {
            SimSpec spec = *cfg.sim;
            SimData sim = generate(spec);
            train = std::move(sim.train);
            calib = cfg.share_train_calib ? train : std::move(sim.calib);
            test = std::move(sim.test);
        } else if (cfg.csv) {
            const CsvSchema schema = CsvSchema::from_file(cfg.csv->schema);
            CategoryDictionary dict;
            auto train_in = ingest_csv(cfg.csv->train, schema, dict);
            train = std::move(train_in.data);
            dropped += train_in.dropped_rows;
            if (cfg.share_train_calib) {
                calib = train;
            } else {
                auto calib_in = ingest_csv(cfg.csv->calib, schema, dict);
                calib = std::move(calib_in.data);
                dropped += calib_in.dropped_rows;
            }
            auto test_in = ingest_csv(cfg.csv->test, schema, dict);
            test = std::move(test_in.data);
            dropped += test_in.dropped_rows;
        } else {
            throw errors::invalid_spec("no dataset configured");
        }
        train.check_consistent();
        calib.check_consistent();
        test.check_consistent();
    });

    // base classifier
    std::function<double(const FeatureVector&)> score;
    with_stage("train", [&] {
        if (cfg.classifier == "lr") {
            auto encoder = OneHotEncoder::fit(train);
            auto standardizer = Standardizer::fit(encoder.encode(train));
            auto model = train_lr(standardizer.apply(encoder.encode(train)), train.labels,
                                  cfg.lr_hyper);
            score = [encoder, standardizer, model](const FeatureVector& fv) {
                return model.predict(standardizer.apply(encoder.encode(fv)));
            };
        } else if (cfg.classifier == "nb") {
            auto model = train_nb(train);
            score = [model](const FeatureVector& fv) { return model.predict(fv); };
        } else {
            throw errors::invalid_spec("unknown classifier '" + cfg.classifier + "'");
        }
    });

    auto score_split = [&](const LabeledDataset& data) {
        std::vector<ScoredInstance> out;
        out.reserve(data.size());
        for (std::size_t i = 0; i < data.size(); ++i)
            out.push_back({score(data.rows[i]), data.labels[i]});
        return out;
    };

    std::vector<ScoredInstance> calib_scores, test_scores;
    with_stage("score", [&] {
        calib_scores = score_split(calib);
        test_scores = score_split(test);
    });

    ExperimentResult result;
    const SortedCalibrationSet calibration_set =
        with_stage("calibrate", [&] { return sort_and_validate(calib_scores); });
    for (const auto& spec : cfg.calibrators) {
        with_stage("calibrate:" + spec.method, [&] {
            result.models.emplace_back(spec.method, fit_calibrator(spec, calibration_set));
        });
    }

    with_stage("eval:raw", [&] {
        result.reports.emplace_back("raw", evaluate(test_scores, cfg.accuracy_threshold));
    });
    for (const auto& [method, model] : result.models) {
        with_stage("eval:" + method, [&] {
            std::vector<ScoredInstance> mapped;
            mapped.reserve(test_scores.size());
            for (const auto& pr : test_scores)
                mapped.push_back({calibrate(model, pr.score), pr.label});
            result.reports.emplace_back(method, evaluate(mapped, cfg.accuracy_threshold));
        });
    }

    result.table = build_results_table(
        cfg.dataset_name.empty() ? (cfg.sim ? pattern_name(cfg.sim->pattern) : "csv")
                                 : cfg.dataset_name,
        cfg.classifier, result.reports);
    result.dropped_rows = dropped;

    if (!cfg.out_dir.empty()) {
        with_stage("write", [&] {
            std::filesystem::create_directories(cfg.out_dir);
            {
                std::ofstream out(cfg.out_dir / "results.csv");
                if (!out)
                    throw errors::io_error("cannot write results.csv");
                write_results_csv(out, result.table);
            }
            {
                std::ofstream out(cfg.out_dir / "results.json");
                if (!out)
                    throw errors::io_error("cannot write results.json");
                out << results_to_json(result.table).dump(2) << '\n';
            }
            for (const auto& [method, report] : result.reports) {
                std::ofstream out(cfg.out_dir / ("reliability_" + method + ".csv"));
                if (!out)
                    throw errors::io_error("cannot write reliability file for " + method);
                write_reliability_csv(out, report.reliability);
            }
        });
    }
    return result;
}

// Overlay of a JSON document onto a config; only the keys present are
// applied, so file values take precedence over whatever was set before.
inline void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j) {
    using nlohmann::json;
    try {
        if (j.contains("dataset")) {
            const json& d = j.at("dataset");
            if (d.contains("sim")) {
                const json& s = d.at("sim");
                SimSpec spec = cfg.sim.value_or(SimSpec{});
                if (s.contains("pattern"))
                    spec.pattern = pattern_from_name(s.at("pattern").get<std::string>());
                if (s.contains("n_train")) spec.n_train = s.at("n_train").get<std::size_t>();
                if (s.contains("n_calib")) spec.n_calib = s.at("n_calib").get<std::size_t>();
                if (s.contains("n_test")) spec.n_test = s.at("n_test").get<std::size_t>();
                if (s.contains("seed")) spec.seed = s.at("seed").get<std::uint64_t>();
                if (s.contains("noise")) spec.noise = s.at("noise").get<double>();
                cfg.sim = spec;
                cfg.csv.reset();
            }
            if (d.contains("csv")) {
                const json& c = d.at("csv");
                CsvSource src;
                src.train = c.at("train").get<std::string>();
                src.calib = c.contains("calib") ? c.at("calib").get<std::string>()
                                                : c.at("train").get<std::string>();
                src.test = c.at("test").get<std::string>();
                src.schema = c.at("schema").get<std::string>();
                cfg.csv = src;
                cfg.sim.reset();
            }
            if (d.contains("share_train_calib"))
                cfg.share_train_calib = d.at("share_train_calib").get<bool>();
            if (d.contains("name"))
                cfg.dataset_name = d.at("name").get<std::string>();
        }
        if (j.contains("classifier")) {
            const json& c = j.at("classifier");
            if (c.contains("kind")) cfg.classifier = c.at("kind").get<std::string>();
            if (c.contains("learning_rate"))
                cfg.lr_hyper.learning_rate = c.at("learning_rate").get<double>();
            if (c.contains("epochs")) cfg.lr_hyper.epochs = c.at("epochs").get<std::size_t>();
            if (c.contains("l2")) cfg.lr_hyper.l2 = c.at("l2").get<double>();
        }
        if (j.contains("calibrators")) {
            cfg.calibrators.clear();
            for (const json& c : j.at("calibrators")) {
                CalibratorSpec spec;
                spec.method = c.at("method").get<std::string>();
                if (c.contains("lambda")) spec.prior.lambda = c.at("lambda").get<double>();
                if (c.contains("gamma_cap"))
                    spec.prior.gamma_cap = c.at("gamma_cap").get<double>();
                if (c.contains("gamma"))
                    spec.prior.gamma_override = c.at("gamma").get<double>();
                if (c.contains("bins")) spec.hist_bins = c.at("bins").get<std::size_t>();
                if (c.contains("cells")) spec.abb_cells = c.at("cells").get<std::size_t>();
                if (c.contains("smoothing"))
                    spec.platt_smoothing = c.at("smoothing").get<bool>();
                cfg.calibrators.push_back(spec);
            }
        }
        if (j.contains("accuracy_threshold"))
            cfg.accuracy_threshold = j.at("accuracy_threshold").get<double>();
        if (j.contains("out_dir"))
            cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw errors::invalid_spec(std::string("bad experiment config: ") + e.what());
    }
}

} // namespace bincal
