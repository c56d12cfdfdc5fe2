#pragma once

#include <stdexcept>
#include <string>

namespace sounder {

// Error families map to CLI exit codes: validation -> 1, numeric -> 2, io -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// named validation failures
struct NotCoprime : ValidationError {
    using ValidationError::ValidationError;
};
struct InvalidRange : ValidationError {
    using ValidationError::ValidationError;
};
struct ZeroSignal : ValidationError {
    using ValidationError::ValidationError;
};
struct DelayOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct OverloadWarning : ValidationError {
    using ValidationError::ValidationError;
};
struct LengthMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptyInput : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptyResult : ValidationError {
    using ValidationError::ValidationError;
};
struct InfeasibleTarget : ValidationError {
    using ValidationError::ValidationError;
};

// named numeric failures
struct DegenerateBin : NumericError {
    using NumericError::NumericError;
};
struct DegenerateCir : NumericError {
    using NumericError::NumericError;
};

// named io failures
struct FormatError : IoError {
    using IoError::IoError;
};
struct MetadataMismatch : IoError {
    using IoError::IoError;
};

} // namespace sounder
