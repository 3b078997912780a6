#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mnexact {

enum class ErrorCode {
    NegativeEntry,
    SumNotOne,
    TooFewCategories,
    NonpositiveN,
    WrongLength,
    NegativeCount,
    WrongTotal,
    UnsupportedLambda,
    ZeroProbabilityCategory,
    DimensionMismatch,
    ThetaOutOfRange,
    AlphaOutOfRange,
    InfeasibleSize,
    AxisOutOfRange,
    ExactZero,
    BothZero,
    EmptyList,
    MalformedLine,
    ProbabilitySumError,
    OutcomeRange,
    InvalidConfig,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::TooFewCategories: return "TooFewCategories";
    case ErrorCode::NonpositiveN: return "NonpositiveN";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::WrongTotal: return "WrongTotal";
    case ErrorCode::UnsupportedLambda: return "UnsupportedLambda";
    case ErrorCode::ZeroProbabilityCategory: return "ZeroProbabilityCategory";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::InfeasibleSize: return "InfeasibleSize";
    case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::ExactZero: return "ExactZero";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::ProbabilitySumError: return "ProbabilitySumError";
    case ErrorCode::OutcomeRange: return "OutcomeRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// Parse errors in line-oriented input keep the 1-based line number.
class LineError : public Error {
public:
    LineError(ErrorCode code, std::size_t line, const std::string& detail)
        : Error(code, "line " + std::to_string(line) + ": " + detail), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mnexact
