#pragma once

#include <stdexcept>
#include <string>

namespace vismem {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero-norm or non-finite tensors where a similarity is required.
struct DegenerateInputError : Error {
    using Error::Error;
};

// Shape mismatches and invalid dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// Bad magic or otherwise unparseable file content.
struct FormatError : Error {
    using Error::Error;
};

// File ended before the declared payload.
struct TruncationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Undefined metric (no positives, single-class input, mismatched inputs).
struct MetricError : Error {
    using Error::Error;
};

}  // namespace vismem
