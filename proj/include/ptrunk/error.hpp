#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptrunk {

enum class ErrorCode {
    invalid_prime,
    domain,
    dimension_mismatch,
    precondition,
    budget,
    insufficient_depth,
    parse,
    unstabilized,
    verification_mismatch,
    usage,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_prime: return "invalid_prime";
        case ErrorCode::domain: return "domain";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::budget: return "budget";
        case ErrorCode::insufficient_depth: return "insufficient_depth";
        case ErrorCode::parse: return "parse";
        case ErrorCode::unstabilized: return "unstabilized";
        case ErrorCode::verification_mismatch: return "verification_mismatch";
        case ErrorCode::usage: return "usage";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ptrunk
