#pragma once

#include <stdexcept>
#include <string>

namespace mcrp {

// Base class for every error this library throws. Feasibility findings about
// otherwise well-formed plans are not errors; they are returned as data
// (see check_feasibility).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed argument values: bad dimensions, out-of-range parameters,
// inconsistent sizes between components.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Time-step index outside the planning horizon.
class RangeError : public Error {
public:
    using Error::Error;
};

// No feasible phasing maneuver exists within the revolution cap.
class InfeasibleTransferError : public Error {
public:
    using Error::Error;
};

// Transfer the cost model cannot price (e.g. different semi-major axes).
class UnsupportedTransferError : public Error {
public:
    using Error::Error;
};

// Plane-reach bound undefined for the requested geometry.
class UndefinedBoundError : public Error {
public:
    using Error::Error;
};

// Structurally invalid plan: wrong shape or slot index out of range.
class InvalidPlanError : public Error {
public:
    using Error::Error;
};

// Document violating the instance/plan schema. `path` names the offending
// field, e.g. "satellites[2].c_max_kms".
class SchemaError : public Error {
public:
    SchemaError(std::string field_path, const std::string& what_arg)
        : Error(field_path + ": " + what_arg), path(std::move(field_path)) {}
    std::string path;
};

// Malformed text input (CSV, JSON syntax).
class ParseError : public Error {
public:
    using Error::Error;
};

// Enumeration request larger than the caller-supplied limit.
class LimitExceededError : public Error {
public:
    using Error::Error;
};

} // namespace mcrp
