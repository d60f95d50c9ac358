#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace workgen {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid distribution or spec parameters.
struct ParamError : Error {
    using Error::Error;
};

/// Fitting requested on data the family cannot represent (e.g. zero variance).
struct DegenerateDataError : Error {
    using Error::Error;
};

/// Too few samples above the split point to fit a tail.
struct InsufficientTailError : Error {
    using Error::Error;
};

/// Rate profile does not cover the requested horizon.
struct CoverageError : Error {
    using Error::Error;
};

/// Client pool is empty, malformed, or mismatched with the request.
struct PoolError : Error {
    using Error::Error;
};

/// Malformed serialized input; carries the 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line_number)
        : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    std::size_t line;
};

}  // namespace workgen
