#pragma once

#include <stdexcept>
#include <string>

namespace hvn {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension or layout disagreement between arguments.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite entries, out-of-range targets, malformed values.
struct InvalidInputError : Error {
    using Error::Error;
};

// Cholesky pivot failure: matrix not positive semidefinite up to jitter.
struct NotPsdError : Error {
    using Error::Error;
};

// Degenerate node sets (duplicate interpolation nodes, empty spectra).
struct DegeneracyError : Error {
    using Error::Error;
};

// Too few samples for an estimator.
struct SampleSizeError : Error {
    using Error::Error;
};

// Text input that does not parse.
struct ParseError : Error {
    using Error::Error;
};

// Missing or unreadable files.
struct IoError : Error {
    using Error::Error;
};

// Invalid experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace hvn
