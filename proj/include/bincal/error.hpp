#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bincal {

enum class ErrorCode {
    EmptyData,
    ScoreOutOfRange,
    NonBinaryLabel,
    IndexOutOfRange,
    InvalidBinCount,
    SingleClassData,
    DivergenceDetected,
    ArityMismatch,
    InvalidSpec,
    FileNotFound,
    SchemaMismatch,
    UnparseableValue,
    IoError,
    CorruptModel,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace errors {

inline Error empty_data(const std::string& what) {
    return {ErrorCode::EmptyData, what + ": no data"};
}

inline Error score_out_of_range(std::size_t index, double value) {
    return {ErrorCode::ScoreOutOfRange,
            "score " + std::to_string(value) + " at index " + std::to_string(index) +
                " is outside [0, 1]"};
}

inline Error query_out_of_range(double value) {
    return {ErrorCode::ScoreOutOfRange,
            "query score " + std::to_string(value) + " is outside [0, 1]"};
}

inline Error non_binary_label(std::size_t index, const std::string& value) {
    return {ErrorCode::NonBinaryLabel,
            "label '" + value + "' at index " + std::to_string(index) + " is not 0 or 1"};
}

inline Error index_out_of_range(const std::string& what) {
    return {ErrorCode::IndexOutOfRange, what};
}

inline Error invalid_bin_count(const std::string& what) {
    return {ErrorCode::InvalidBinCount, what};
}

inline Error single_class_data(const std::string& what) {
    return {ErrorCode::SingleClassData, what + ": both classes must be present"};
}

inline Error divergence_detected(std::size_t epoch, double loss) {
    return {ErrorCode::DivergenceDetected,
            "training loss increased for 10 consecutive epochs (epoch " +
                std::to_string(epoch) + ", loss " + std::to_string(loss) + ")"};
}

inline Error arity_mismatch(const std::string& what) {
    return {ErrorCode::ArityMismatch, what};
}

inline Error invalid_spec(const std::string& what) {
    return {ErrorCode::InvalidSpec, what};
}

inline Error file_not_found(const std::string& path) {
    return {ErrorCode::FileNotFound, "file not found: " + path};
}

inline Error schema_mismatch(const std::string& column, const std::string& detail) {
    return {ErrorCode::SchemaMismatch, "column '" + column + "': " + detail};
}

inline Error unparseable_value(std::size_t row, const std::string& column,
                               const std::string& value) {
    return {ErrorCode::UnparseableValue,
            "row " + std::to_string(row) + ", column '" + column + "': cannot parse '" +
                value + "'"};
}

inline Error io_error(const std::string& what) {
    return {ErrorCode::IoError, what};
}

inline Error corrupt_model(const std::string& detail) {
    return {ErrorCode::CorruptModel, "corrupt model file: " + detail};
}

} // namespace errors
} // namespace bincal
