#pragma once

#include <stdexcept>
#include <string>

namespace bessim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed. Messages name the offending row.
struct LoadError : Error {
    using Error::Error;
};

// Series do not share start, step, or length.
struct AlignmentError : Error {
    using Error::Error;
};

struct InterpolationError : Error {
    using Error::Error;
};

// Bad scenario configuration (tariff ordering, missing files, ...).
struct ConfigError : Error {
    using Error::Error;
};

// A referenced input file does not exist. Kept distinct so the CLI can
// map it to its own exit code.
struct MissingInputError : ConfigError {
    using ConfigError::ConfigError;
};

// An optimization model has no feasible point; `family` names the
// constraint family that cannot be satisfied.
struct InfeasibleError : Error {
    InfeasibleError(const std::string& msg, std::string family_)
        : Error(msg), family(std::move(family_)) {}
    std::string family;
};

// MILP node budget exhausted before proving optimality.
struct SolverTimeoutError : Error {
    SolverTimeoutError(const std::string& msg, double incumbent_, double gap_)
        : Error(msg), incumbent(incumbent_), gap(gap_) {}
    double incumbent;
    double gap;
};

// A produced Schedule violates one of its invariants.
struct ValidationError : Error {
    using Error::Error;
};

} // namespace bessim
