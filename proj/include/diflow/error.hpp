#pragma once

#include <stdexcept>
#include <string>

namespace diflow {

enum class ErrorCode {
    FileNotFound,
    ParseError,
    NonMonotoneTimestamps,
    DuplicateTimestamp,
    EmptyIntersection,
    TooShort,
    DivisionByZero,
    TooFewSamples,
    DegenerateGeometry,
    DomainError,
    UnmappedNode,
    NonConvergence,
    WindowTooLong,
    BlockTooShort,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception carrying a machine-checkable code plus a message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
        case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::UnmappedNode: return "UnmappedNode";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::WindowTooLong: return "WindowTooLong";
        case ErrorCode::BlockTooShort: return "BlockTooShort";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace diflow
