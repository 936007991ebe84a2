#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recur2d {

enum class ErrorCode {
    NotPrimitive,
    RadiusMismatch,
    InadmissibleWindow,
    EigenSolverFailure,
    SingularFundamentalMatrix,
    NonzeroDrift,
    SingularCovariance,
    BudgetExceeded,
    NotMaxEntropy,
    EmptySample,
    DegenerateDesign,
    ConfigInvalid,
    InvalidArgument,
    Io,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by the exact DP and the tail experiment when a resource bound is hit.
// required() is the minimal budget (bytes or steps) that would have sufficed.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, std::uint64_t required)
        : Error(ErrorCode::BudgetExceeded, what), required_(required) {}

    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

}  // namespace recur2d
