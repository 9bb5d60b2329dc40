#pragma once

#include <stdexcept>
#include <string>

namespace cgmcts {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A program violates the structural invariants of a workflow graph.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied data is missing or malformed (missing root input, length mismatch, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// A documented precondition was broken (score outside [0,1], weights off the simplex, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Refinement was attempted on a frozen motif library.
class FrozenError : public Error {
public:
    using Error::Error;
};

/// Motif template generation could not satisfy the separation requirement.
class InitError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A document (program, library, run log, problem set) failed to parse.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Transport failure talking to an external proposer or evaluator.
class AdapterError : public Error {
public:
    using Error::Error;
};

}  // namespace cgmcts
