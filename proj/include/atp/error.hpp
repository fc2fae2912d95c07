#pragma once

#include <stdexcept>
#include <string>

namespace atp {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value (violated invariant, out-of-domain field).
struct ConfigError : Error {
    using Error::Error;
};

/// Degenerate geometric input, e.g. origin == selected destination.
struct GeometryError : Error {
    using Error::Error;
};

/// Operation applied to an object in the wrong state
/// (e.g. recording a response on a converged staircase).
struct StateError : Error {
    using Error::Error;
};

/// Invalid runtime input (bad CLI argument, out-of-range response, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    int line;
    ParseError(const std::string& msg, int line_number)
        : Error(msg + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
};

}  // namespace atp
