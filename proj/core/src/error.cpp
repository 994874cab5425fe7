#include "nlcp/error.hpp"

namespace nlcp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::NegativeThreshold: return "NegativeThreshold";
    case ErrorCode::InsufficientCalibration: return "InsufficientCalibration";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteLabel: return "NonFiniteLabel";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NegativeSigma: return "NegativeSigma";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DeconvFailure: return "DeconvFailure";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace nlcp
