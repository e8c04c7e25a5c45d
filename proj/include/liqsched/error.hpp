#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liqsched {

/// Failure categories raised by the library. Each maps to a stable name that
/// appears in CLI reports.
enum class ErrorCode {
    NonpositiveEta,
    NegativeGamma,
    NonpositiveHorizon,
    NegativeCoefficient,
    BadBreakpoints,
    BadInstance,
    OutOfRange,
    BadGridSpec,
    NonFiniteField,
    SingularMatrix,
    NoContraction,
    BlowUp,
    TerminalMiss,
    SingularKKT,
    NonConvex,
    BadConfig,
};

constexpr std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonpositiveEta: return "NonpositiveEta";
        case ErrorCode::NegativeGamma: return "NegativeGamma";
        case ErrorCode::NonpositiveHorizon: return "NonpositiveHorizon";
        case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
        case ErrorCode::BadBreakpoints: return "BadBreakpoints";
        case ErrorCode::BadInstance: return "BadInstance";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::BadGridSpec: return "BadGridSpec";
        case ErrorCode::NonFiniteField: return "NonFiniteField";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NoContraction: return "NoContraction";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::TerminalMiss: return "TerminalMiss";
        case ErrorCode::SingularKKT: return "SingularKKT";
        case ErrorCode::NonConvex: return "NonConvex";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

/// Exception carrying an ErrorCode; what() is "<Name>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail)
        , code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace liqsched
