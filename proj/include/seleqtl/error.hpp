#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seleqtl {

enum class ErrorCode {
    InvalidArgument,
    ConstantColumn,
    DegenerateResidual,
    RankDeficient,
    NotEnoughClusters,
    NoConvergence,
    InvalidQuantileArgument,
    InnerSolverFailure,
    OracleScopeExceeded,
    RootNotBracketed,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure kind for callers that quarantine or retry.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace seleqtl
