#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asymlab {

enum class ErrorCode {
    InvalidParams,
    StructureViolation,
    OutOfRange,
    NoConvergence,
    Inconclusive,
    DimensionMismatch,
    NonpositiveRadius,
    NotRemovableType,
    BoundedOperator,
    NoAlpha,
    TooFewNodes,
    DomainExceeded,
    StencilOutOfDomain,
    DegenerateGradient,
    IllConditioned,
    BoundaryOrderViolated,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

// Literal messages are only turned into a string on failure; hot paths rely
// on this to stay allocation free.
inline void require(bool condition, ErrorCode code, const char* what) {
    if (!condition) fail(code, what);
}

}  // namespace asymlab
