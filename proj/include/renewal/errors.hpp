#pragma once

#include <stdexcept>
#include <string>

namespace renewal {

/// Malformed or dimensionally inconsistent input supplied by the caller.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the mathematical domain of an operation (non-positive frame
/// length, auxiliary point outside its box, empty sample set, ...).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numeric routine could not complete: bracket repair exhausted, iteration
/// cap reached, or similar.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// The scenario lacks a capability the requested algorithm needs (e.g. no
/// attribute processes for the concave-utility loop).
struct CapabilityError : std::runtime_error {
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A structural invariant checked during a run failed.  The message names the
/// invariant and the frame at which it broke.
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace renewal
