#include "asymlab/error.hpp"

namespace asymlab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::StructureViolation: return "StructureViolation";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::Inconclusive: return "Inconclusive";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
        case ErrorCode::NotRemovableType: return "NotRemovableType";
        case ErrorCode::BoundedOperator: return "BoundedOperator";
        case ErrorCode::NoAlpha: return "NoAlpha";
        case ErrorCode::TooFewNodes: return "TooFewNodes";
        case ErrorCode::DomainExceeded: return "DomainExceeded";
        case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
        case ErrorCode::DegenerateGradient: return "DegenerateGradient";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::BoundaryOrderViolated: return "BoundaryOrderViolated";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace asymlab
