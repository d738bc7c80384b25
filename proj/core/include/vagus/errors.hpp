#pragma once

#include <stdexcept>
#include <string>

namespace vagus {

// Base class for everything this library throws on purpose.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A state or argument violated a structural precondition (non-finite input,
// negative Michaelis constant, gate outside [0,1] on entry, ...).
struct InvalidStateError : SimError {
    using SimError::SimError;
};

// Numerical blow-up during integration. Carries the stage that failed and the
// simulation time (seconds) of the first bad sample.
struct DivergenceError : SimError {
    std::string stage;
    double t_fail;

    DivergenceError(std::string stage_, double t_fail_, const std::string& what_)
        : SimError(what_), stage(std::move(stage_)), t_fail(t_fail_) {}
};

// Malformed or inconsistent configuration input.
struct ConfigError : SimError {
    using SimError::SimError;
};

// Two sequences that must line up (same bin count / bin width) do not.
struct AlignmentError : SimError {
    using SimError::SimError;
};

// An input that must be sorted in time is not.
struct OrderingError : SimError {
    using SimError::SimError;
};

// Too many trials of a sweep failed to continue meaningfully.
struct SweepError : SimError {
    using SimError::SimError;
};

}  // namespace vagus
