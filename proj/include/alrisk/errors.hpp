#pragma once

#include <stdexcept>
#include <string>

namespace alrisk {

// Error taxonomy used across the library. All derive from std::runtime_error
// (or std::invalid_argument) so callers can catch coarsely or precisely.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// A proposal emitted masses that are negative, unnormalized, or otherwise unusable.
struct ProposalError : std::runtime_error {
    explicit ProposalError(const std::string& what) : std::runtime_error(what) {}
};

// Every admissible next index has zero mass (e.g. loss-proportional with all-zero losses).
struct DegenerateProposalError : ProposalError {
    explicit DegenerateProposalError(const std::string& what) : ProposalError(what) {}
};

// Guard against factorial blowup in exhaustive enumeration.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Two algebraically equivalent computation routes disagreed beyond tolerance.
struct InternalConsistencyError : std::logic_error {
    explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

struct SingularSystemError : std::runtime_error {
    explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

// A run-level invariant check failed (maps to CLI exit code 2).
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace alrisk
