#include "seleqtl/error.hpp"

namespace seleqtl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::DegenerateResidual: return "DegenerateResidual";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotEnoughClusters: return "NotEnoughClusters";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidQuantileArgument: return "InvalidQuantileArgument";
    case ErrorCode::InnerSolverFailure: return "InnerSolverFailure";
    case ErrorCode::OracleScopeExceeded: return "OracleScopeExceeded";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace seleqtl
