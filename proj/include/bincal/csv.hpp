#pragma once

// CSV ingestion and emission. Datasets are UTF-8 comma-separated files with a
// header row; a small JSON schema names the label column and classifies every
// feature column as continuous or categorical. Rows with missing values
// (empty cells or "?") are dropped and counted. Categorical strings are coded
// through a dictionary that is shared across the files of one experiment so
// codes stay consistent between splits.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bincal/core.hpp"
#include "bincal/dataset.hpp"
#include "bincal/error.hpp"

namespace bincal {

struct CsvSchema {
    std::string label;
    std::vector<std::string> continuous;
    std::vector<std::string> categorical;

    static CsvSchema from_json(const nlohmann::json& j) {
        CsvSchema schema;
        try {
            schema.label = j.at("label").get<std::string>();
            if (j.contains("continuous"))
                schema.continuous = j.at("continuous").get<std::vector<std::string>>();
            if (j.contains("categorical"))
                schema.categorical = j.at("categorical").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw errors::schema_mismatch("(schema)", e.what());
        }
        return schema;
    }

    static CsvSchema from_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path))
            throw errors::file_not_found(path.string());
        std::ifstream in(path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw errors::schema_mismatch("(schema)", e.what());
        }
        return from_json(j);
    }

    nlohmann::json to_json() const {
        return {{"label", label}, {"continuous", continuous}, {"categorical", categorical}};
    }
};

// value -> small-integer code, per categorical column, growing on first sight.
struct CategoryDictionary {
    std::map<std::string, std::map<std::string, int>> codes;

    int encode(const std::string& column, const std::string& value) {
        auto& table = codes[column];
        auto it = table.find(value);
        if (it != table.end())
            return it->second;
        const int code = static_cast<int>(table.size());
        table.emplace(value, code);
        return code;
    }
};

struct IngestResult {
    LabeledDataset data;
    std::size_t dropped_rows = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',')
        fields.push_back("");
    return fields;
}

inline bool is_missing(const std::string& value) { return value.empty() || value == "?"; }

} // namespace detail

inline IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema,
                               CategoryDictionary& dict) {
    if (!std::filesystem::exists(path))
        throw errors::file_not_found(path.string());
    std::ifstream in(path);
    if (!in)
        throw errors::io_error("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line))
        throw errors::empty_data("ingest_csv('" + path.string() + "')");
    const auto header = detail::split_csv_line(line);
    std::map<std::string, std::size_t> column_of;
    for (std::size_t i = 0; i < header.size(); ++i)
        column_of[header[i]] = i;

    auto require = [&](const std::string& name) {
        auto it = column_of.find(name);
        if (it == column_of.end())
            throw errors::schema_mismatch(name, "not present in header of " + path.string());
        return it->second;
    };
    const std::size_t label_col = require(schema.label);
    std::vector<std::size_t> cont_cols, cat_cols;
    for (const auto& name : schema.continuous)
        cont_cols.push_back(require(name));
    for (const auto& name : schema.categorical)
        cat_cols.push_back(require(name));

    IngestResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw Error(ErrorCode::UnparseableValue,
                        "row " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));

        bool missing = detail::is_missing(fields[label_col]);
        for (std::size_t c : cont_cols)
            missing = missing || detail::is_missing(fields[c]);
        for (std::size_t c : cat_cols)
            missing = missing || detail::is_missing(fields[c]);
        if (missing) {
            ++result.dropped_rows;
            continue;
        }

        const std::string& label_text = fields[label_col];
        int label;
        if (label_text == "0")
            label = 0;
        else if (label_text == "1")
            label = 1;
        else
            throw errors::non_binary_label(line_no, label_text);

        FeatureVector fv;
        fv.cont.reserve(cont_cols.size());
        for (std::size_t k = 0; k < cont_cols.size(); ++k) {
            const std::string& text = fields[cont_cols[k]];
            char* parse_end = nullptr;
            const double value = std::strtod(text.c_str(), &parse_end);
            if (parse_end == text.c_str() || *parse_end != '\0')
                throw errors::unparseable_value(line_no, schema.continuous[k], text);
            fv.cont.push_back(value);
        }
        fv.cat.reserve(cat_cols.size());
        for (std::size_t k = 0; k < cat_cols.size(); ++k)
            fv.cat.push_back(dict.encode(schema.categorical[k], fields[cat_cols[k]]));

        result.data.rows.push_back(std::move(fv));
        result.data.labels.push_back(label);
    }
    if (result.data.empty())
        throw errors::empty_data("ingest_csv('" + path.string() + "')");
    return result;
}

inline IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    CategoryDictionary dict;
    return ingest_csv(path, schema, dict);
}

// Continuous-feature dataset writer (the simulated-data emission path).
inline void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& data,
                              const std::vector<std::string>& feature_names,
                              const std::string& label_name = "label") {
    std::ofstream out(path);
    if (!out)
        throw errors::io_error("cannot open '" + path.string() + "' for writing");
    for (const auto& name : feature_names)
        out << name << ',';
    out << label_name << '\n';
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.rows[i].cont) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << data.labels[i] << '\n';
    }
    if (!out)
        throw errors::io_error("write failed for '" + path.string() + "'");
}

// (score, label) files passed between the training and calibration stages.
inline void write_scores_csv(const std::filesystem::path& path,
                             const std::vector<ScoredInstance>& scores) {
    std::ofstream out(path);
    if (!out)
        throw errors::io_error("cannot open '" + path.string() + "' for writing");
    out << "score,label\n";
    char buf[64];
    for (const auto& row : scores) {
        std::snprintf(buf, sizeof(buf), "%.17g", row.score);
        out << buf << ',' << row.label << '\n';
    }
    if (!out)
        throw errors::io_error("write failed for '" + path.string() + "'");
}

inline std::vector<ScoredInstance> read_scores_csv(const std::filesystem::path& path) {
    CsvSchema schema;
    schema.label = "label";
    schema.continuous = {"score"};
    const IngestResult result = ingest_csv(path, schema);
    std::vector<ScoredInstance> out;
    out.reserve(result.data.size());
    for (std::size_t i = 0; i < result.data.size(); ++i)
        out.push_back({result.data.rows[i].cont[0], result.data.labels[i]});
    return out;
}

} // namespace bincal
