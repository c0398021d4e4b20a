#pragma once

#include <stdexcept>
#include <string>

namespace randchain {

// Base class for all library errors. CLI maps these to exit code 1;
// flag/usage problems are handled by the CLI layer itself (exit code 2).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside its documented domain (index, k, m, ...).
struct RangeError : Error {
    using Error::Error;
};

// Invalid run configuration (k > n, empty machine list, trials = 0, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Feature/weight vector length mismatch.
struct DimensionError : Error {
    using Error::Error;
};

// Lookup of an id that is not present.
struct KeyError : Error {
    using Error::Error;
};

// Caller violated a documented precondition (e.g. minimising a
// non-evasive trace).
struct ContractError : Error {
    using Error::Error;
};

// Text input could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

// A cell holds something other than the allowed characters.
struct FormatError : ParseError {
    using ParseError::ParseError;
};

// Duplicate sample id or detector name.
struct UniquenessError : ParseError {
    using ParseError::ParseError;
};

// Ragged row, empty body, missing header.
struct ShapeError : ParseError {
    using ParseError::ParseError;
};

}  // namespace randchain
