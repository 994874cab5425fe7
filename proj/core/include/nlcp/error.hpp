#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlcp {

enum class ErrorCode {
    InvalidArgument,
    InvalidRecord,
    MissingLabel,
    NegativeThreshold,
    InsufficientCalibration,
    EmptyInput,
    NonFiniteLabel,
    OutOfRange,
    NegativeSigma,
    AllMasked,
    NonConvergence,
    DeconvFailure,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nlcp
