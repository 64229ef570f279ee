#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sepbell {

enum class ErrorCode {
    InvalidDimension,
    InvalidPhase,
    DimensionMismatch,
    SizeLimit,
    InvalidCoefficients,
    InvalidParameter,
    InvalidEnsemble,
    InvalidState,
    Strategy,
    NotHermitian,
    TrivialPartition,
    InvalidShots,
    Format,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    // Resource exhaustion (size caps, combination caps) as opposed to bad input.
    [[nodiscard]] bool is_resource_error() const noexcept
    {
        return code_ == ErrorCode::SizeLimit || code_ == ErrorCode::Strategy;
    }

private:
    ErrorCode code_;
};

}  // namespace sepbell
