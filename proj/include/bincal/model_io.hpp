#pragma once

// A common handle over every fitted calibrator plus JSON persistence. Models
// serialize to a versioned envelope; loading reproduces the original model's
// outputs exactly (stored doubles round-trip, and the averaging model is
// rebuilt from its training data with the identical arithmetic).

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bincal/baseline_calibrators.hpp"
#include "bincal/binning_calibrators.hpp"
#include "bincal/core.hpp"
#include "bincal/error.hpp"

namespace bincal {

using CalibrationMap =
    std::variant<SbbModel, AbbModel, CachedAbbModel, HistogramModel, PlattModel, IsotonicModel>;

inline double calibrate(const CalibrationMap& map, double x) {
    return std::visit([x](const auto& model) { return model.calibrate(x); }, map);
}

inline std::string model_kind(const CalibrationMap& map) {
    struct Namer {
        std::string operator()(const SbbModel&) const { return "sbb"; }
        std::string operator()(const AbbModel&) const { return "abb"; }
        std::string operator()(const CachedAbbModel&) const { return "abb-cached"; }
        std::string operator()(const HistogramModel&) const { return "histogram"; }
        std::string operator()(const PlattModel&) const { return "platt"; }
        std::string operator()(const IsotonicModel&) const { return "isotonic"; }
    };
    return std::visit(Namer{}, map);
}

namespace io {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;
constexpr const char* kModelFormatName = "bincal-model";

inline json binning_to_json(const Binning& binning) {
    json j;
    for (const Bin& bin : binning.bins) {
        j["begin"].push_back(bin.begin);
        j["end"].push_back(bin.end);
        j["n0"].push_back(bin.n0);
        j["n1"].push_back(bin.n1);
        j["left"].push_back(bin.left_edge);
        j["right"].push_back(bin.right_edge);
    }
    return j;
}

inline Binning binning_from_json(const json& j) {
    Binning binning;
    const auto& begin = j.at("begin");
    for (std::size_t i = 0; i < begin.size(); ++i) {
        Bin bin;
        bin.begin = j.at("begin")[i].get<std::size_t>();
        bin.end = j.at("end")[i].get<std::size_t>();
        bin.n0 = j.at("n0")[i].get<std::size_t>();
        bin.n1 = j.at("n1")[i].get<std::size_t>();
        bin.left_edge = j.at("left")[i].get<double>();
        bin.right_edge = j.at("right")[i].get<double>();
        binning.bins.push_back(bin);
    }
    return binning;
}

inline json model_payload(const SbbModel& m) {
    return {{"n", m.n},        {"lambda", m.lambda},       {"gamma", m.gamma},
            {"log_score", m.log_score.value},              {"bins", binning_to_json(m.binning)},
            {"estimates", m.estimates}};
}

inline json model_payload(const AbbModel& m) {
    std::vector<int> labels(m.set.labels().begin(), m.set.labels().end());
    return {{"lambda", m.lambda},
            {"gamma", m.gamma},
            {"scores", m.set.scores()},
            {"labels", labels}};
}

inline json model_payload(const CachedAbbModel& m) {
    return {{"n", m.n}, {"lambda", m.lambda}, {"gamma", m.gamma},
            {"cells", m.cells}, {"values", m.values}};
}

inline json model_payload(const HistogramModel& m) {
    return {{"n", m.n},
            {"requested_bins", m.requested_bins},
            {"bins", binning_to_json(m.binning)},
            {"estimates", m.estimates}};
}

inline json model_payload(const PlattModel& m) {
    return {{"slope", m.slope},
            {"offset", m.offset},
            {"smoothed_targets", m.smoothed_targets},
            {"converged", m.converged},
            {"gradient_norm", m.gradient_norm},
            {"iterations", m.iterations}};
}

inline json model_payload(const IsotonicModel& m) {
    return {{"thresholds", m.thresholds}, {"values", m.values}};
}

} // namespace io

inline nlohmann::json to_json(const CalibrationMap& map) {
    nlohmann::json j;
    j["format"] = io::kModelFormatName;
    j["version"] = io::kModelFormatVersion;
    j["kind"] = model_kind(map);
    j["model"] = std::visit([](const auto& m) { return io::model_payload(m); }, map);
    return j;
}

inline CalibrationMap from_json(const nlohmann::json& j) {
    using nlohmann::json;
    try {
        if (j.at("format").get<std::string>() != io::kModelFormatName)
            throw errors::corrupt_model("unexpected format '" +
                                        j.at("format").get<std::string>() + "'");
        const int version = j.at("version").get<int>();
        if (version != io::kModelFormatVersion)
            throw errors::corrupt_model("unsupported version " + std::to_string(version) +
                                        " (expected " +
                                        std::to_string(io::kModelFormatVersion) + ")");
        const std::string kind = j.at("kind").get<std::string>();
        const json& m = j.at("model");

        if (kind == "sbb") {
            SbbModel model;
            model.n = m.at("n").get<std::size_t>();
            model.lambda = m.at("lambda").get<double>();
            model.gamma = m.at("gamma").get<double>();
            model.log_score = {m.at("log_score").get<double>()};
            model.binning = io::binning_from_json(m.at("bins"));
            model.estimates = m.at("estimates").get<std::vector<double>>();
            if (model.estimates.size() != model.binning.bins.size())
                throw errors::corrupt_model("bin and estimate counts differ");
            return model;
        }
        if (kind == "abb") {
            auto scores = m.at("scores").get<std::vector<double>>();
            auto labels_int = m.at("labels").get<std::vector<int>>();
            std::vector<std::uint8_t> labels(labels_int.begin(), labels_int.end());
            auto set = SortedCalibrationSet::from_sorted(std::move(scores), std::move(labels));
            BinningPriorConfig cfg;
            cfg.lambda = m.at("lambda").get<double>();
            cfg.gamma_override = m.at("gamma").get<double>();
            return fit_abb(set, cfg);
        }
        if (kind == "abb-cached") {
            CachedAbbModel model;
            model.n = m.at("n").get<std::size_t>();
            model.lambda = m.at("lambda").get<double>();
            model.gamma = m.at("gamma").get<double>();
            model.cells = m.at("cells").get<std::size_t>();
            model.values = m.at("values").get<std::vector<double>>();
            if (model.cells < 2 || model.values.size() != model.cells)
                throw errors::corrupt_model("cache cell count mismatch");
            return model;
        }
        if (kind == "histogram") {
            HistogramModel model;
            model.n = m.at("n").get<std::size_t>();
            model.requested_bins = m.at("requested_bins").get<std::size_t>();
            model.binning = io::binning_from_json(m.at("bins"));
            model.estimates = m.at("estimates").get<std::vector<double>>();
            if (model.estimates.size() != model.binning.bins.size())
                throw errors::corrupt_model("bin and estimate counts differ");
            return model;
        }
        if (kind == "platt") {
            PlattModel model;
            model.slope = m.at("slope").get<double>();
            model.offset = m.at("offset").get<double>();
            model.smoothed_targets = m.at("smoothed_targets").get<bool>();
            model.converged = m.at("converged").get<bool>();
            model.gradient_norm = m.at("gradient_norm").get<double>();
            model.iterations = m.at("iterations").get<std::size_t>();
            return model;
        }
        if (kind == "isotonic") {
            IsotonicModel model;
            model.thresholds = m.at("thresholds").get<std::vector<double>>();
            model.values = m.at("values").get<std::vector<double>>();
            if (model.thresholds.empty() || model.thresholds.size() != model.values.size())
                throw errors::corrupt_model("threshold and value counts differ");
            return model;
        }
        throw errors::corrupt_model("unknown model kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw errors::corrupt_model(e.what());
    }
}

inline void save_model(const CalibrationMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw errors::io_error("cannot open '" + path.string() + "' for writing");
    out << to_json(map).dump(2) << '\n';
    if (!out)
        throw errors::io_error("write failed for '" + path.string() + "'");
}

inline CalibrationMap load_model(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw errors::file_not_found(path.string());
    std::ifstream in(path);
    if (!in)
        throw errors::io_error("cannot open '" + path.string() + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw errors::corrupt_model(e.what());
    }
    return from_json(j);
}

} // namespace bincal
