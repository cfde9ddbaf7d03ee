#pragma once

#include <stdexcept>
#include <string>

namespace abdesign {

/// Invalid user-facing configuration: CLI flags, config files, schedule bounds.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A component produced output that violates its interface contract
/// (shape mismatch, non-finite values where finiteness is required, ...).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Base class for property-evaluator failures. Carries the candidate index
/// when the failure happened while scoring one of K guidance candidates.
struct EvaluatorError : std::runtime_error {
    explicit EvaluatorError(const std::string& msg, long candidate = -1)
        : std::runtime_error(msg), candidate_index(candidate) {}
    long candidate_index;
};

/// The external evaluator did not answer within the configured deadline.
struct EvaluatorTimeout : EvaluatorError {
    using EvaluatorError::EvaluatorError;
};

/// The external evaluator answered, but the response violates the wire
/// protocol (malformed line, missing fields, request id mismatch).
struct EvaluatorProtocolError : EvaluatorError {
    using EvaluatorError::EvaluatorError;
};

/// The external evaluator process died or exited with a nonzero status.
struct EvaluatorProcessError : EvaluatorError {
    using EvaluatorError::EvaluatorError;
};

}  // namespace abdesign
