#include "sepbell/errors.hpp"

namespace sepbell {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidPhase: return "invalid-phase";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::InvalidCoefficients: return "invalid-coefficients";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidEnsemble: return "invalid-ensemble";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::Strategy: return "strategy";
    case ErrorCode::NotHermitian: return "not-hermitian";
    case ErrorCode::TrivialPartition: return "trivial-partition";
    case ErrorCode::InvalidShots: return "invalid-shots";
    case ErrorCode::Format: return "format";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace sepbell
