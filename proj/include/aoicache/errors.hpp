#pragma once

#include <stdexcept>
#include <string>

namespace aoicache {

// Every error raised by the library derives from Error so callers can catch
// the whole family; the subclasses let the CLI map failures to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (non-positive rate, bad
/// vector length, unknown config key, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A queue would be unstable (arrival rate at or above service rate).
class Overload : public Error {
public:
    using Error::Error;
};

/// An optimization problem has no feasible point.
class Infeasible : public Error {
public:
    using Error::Error;
};

/// RSUC split at beta = 0 or beta = 1, where the AoI is unbounded or no
/// delivery is possible.
class DegenerateSplit : public Error {
public:
    using Error::Error;
};

/// ReA with update probability 0: the cached item is never refreshed.
class UnboundedAoi : public Error {
public:
    using Error::Error;
};

/// Should not happen for well-formed inputs (e.g. bisection cap exhausted).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace aoicache
